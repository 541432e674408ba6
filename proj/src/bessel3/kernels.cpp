#include "svolkit/bessel3.hpp"
#include "svolkit/errors.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace svolkit {

namespace {

using cld = std::complex<long double>;

void check_b_t(double b, double t, const char* who) {
    if (!(b > 0.0) || !std::isfinite(b)) throw std::invalid_argument(std::string(who) + ": b must be positive");
    if (!(t > 0.0) || !std::isfinite(t)) throw std::invalid_argument(std::string(who) + ": t must be positive");
}

// u coth u - 1
double ucoth_m1(double u) {
    if (u < 0.1) {
        const double u2 = u * u;
        return u2 * (1.0 / 3 - u2 * (1.0 / 45 - u2 * (2.0 / 945 - u2 / 4725)));
    }
    return u / std::tanh(u) - 1.0;
}

// log(sinh u / u)
double log_sinhc(double u) {
    if (u < 0.05) {
        const double u2 = u * u;
        return std::log1p(u2 * (1.0 / 6 + u2 * (1.0 / 120 + u2 / 5040)));
    }
    return log_sinh(u) - std::log(u);
}

double normal_log_pdf(double z, double var) { return -0.5 * z * z / var - 0.5 * std::log(2.0 * M_PI * var); }

} // namespace

double log_eq_a1(double b, double c, double t, double x) {
    check_b_t(b, t, "eq_a1");
    if (!(c >= 0.0) || !std::isfinite(c)) throw std::invalid_argument("eq_a1: c must be >= 0");
    const double u = b * t;
    const double k = 2.0 * c / b;
    // log(cosh u + k sinh u)
    double log_den;
    if (u < 20.0) {
        log_den = std::log(std::cosh(u) + k * std::sinh(u));
    } else {
        log_den = u + std::log((1.0 + k) + (1.0 - k) * std::exp(-2.0 * u)) - M_LN2;
    }
    const double th = std::tanh(u);
    const double rate = (b * th + 2.0 * c) / (1.0 + k * th);
    return -0.5 * log_den - 0.5 * x * x * rate;
}

double eq_a1(double b, double c, double t, double x) { return std::exp(log_eq_a1(b, c, t, x)); }

double log_eq_a2(double b, double t, double x, double y) {
    check_b_t(b, t, "eq_a2");
    const double u = b * t;
    const double d = y - x;
    return -0.5 * log_sinhc(u) - (d * d * ucoth_m1(u) + 2.0 * u * x * y * std::tanh(0.5 * u)) / (2.0 * t);
}

double eq_a2(double b, double t, double x, double y) { return std::exp(log_eq_a2(b, t, x, y)); }

std::complex<long double> h_star(double t, std::complex<long double> c, double z) {
    if (!(t > 0.0) || !std::isfinite(t)) throw std::invalid_argument("h_star: t must be positive");
    const long double tl = t;
    const long double z2 = static_cast<long double>(z) * z;
    const long double log_norm = -0.5L * std::log(2.0L * 3.141592653589793238462643383279502884L);
    const cld w = std::sqrt(2.0L * c);
    const cld tw = tl * w;
    cld log_ratio; // log(w / sinh(t w))
    cld wcoth;     // w coth(t w)
    if (std::abs(tw) < 1e-3L) {
        const cld q = tw * tw;
        log_ratio = -std::log(tl) - std::log(1.0L + q / 6.0L + q * q / 120.0L);
        wcoth = (1.0L + q / 3.0L - q * q / 45.0L) / tl;
    } else {
        // Re w >= 0, so |e^{-2tw}| <= 1 and the logs below stay on one branch
        const cld e = std::exp(-2.0L * tw);
        log_ratio = std::log(w) - (tw + std::log(1.0L - e) - std::log(2.0L));
        wcoth = w * (1.0L + e) / (1.0L - e);
    }
    return std::exp(log_norm + 0.5L * log_ratio - 0.5L * z2 * wcoth);
}

double h_star(double t, double c, double z) {
    if (!(c >= 0.0)) throw std::invalid_argument("h_star: c must be >= 0");
    return static_cast<double>(std::real(h_star(t, cld(c, 0.0L), z)));
}

void Bes3LaplacePoint::validate() const {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("bes3_laplace: lambda must be positive");
    if (!(b > 0.0) || !std::isfinite(b)) throw std::invalid_argument("bes3_laplace: b must be positive");
    if (!(t > 0.0) || !std::isfinite(t)) throw std::invalid_argument("bes3_laplace: t must be positive");
}

double bes3_laplace(const Bes3LaplacePoint& pt, const QuadratureSpec& spec) {
    pt.validate();
    spec.validate();
    const double t = pt.t, lam = pt.lambda;
    const double u = pt.b * t;
    const double damp = u < 1e-8 ? 1.0 : u / std::sinh(u);
    auto f = [&](double y) {
        if (y <= 0.0) return 0.0;
        // direct path from +1; the image term from -1 is e^{-2 y damp / t} times it
        const double log_direct = std::log(y) - 0.5 * lam * (y * y - 1.0 - 3.0 * t) + normal_log_pdf(y - 1.0, t) +
                                  log_eq_a2(pt.b, t, 1.0, y);
        if (log_direct < -745.0) return 0.0;
        return std::exp(log_direct) * -std::expm1(-2.0 * y * damp / t);
    };
    try {
        return integrate_1d(f, 0.0, std::numeric_limits<double>::infinity(), spec).value;
    } catch (const NonConvergence& e) {
        throw NonConvergence(std::string("bes3_laplace: ") + e.what(), "y");
    }
}

double joint_bm_density(double z, double y, double t, const LaplaceInversionSpec& inv) {
    if (!(y > 0.0) || !std::isfinite(y)) throw std::invalid_argument("joint_bm_density: y must be positive");
    if (!(t > 0.0) || !std::isfinite(t)) throw std::invalid_argument("joint_bm_density: t must be positive");
    if (!std::isfinite(z)) throw std::invalid_argument("joint_bm_density: z must be finite");
    return invert_laplace([t, z](cld c) { return h_star(t, c, z); }, y, inv);
}

} // namespace svolkit
