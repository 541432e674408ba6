#include "svolkit/errors.hpp"
#include "svolkit/lognormal.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <string>

namespace svolkit {

namespace {

// d/sin(d) - 1 and its derivative, stable near d = 0.
double dsin_m1(double d) {
    if (d < 0.05) {
        const double d2 = d * d;
        return d2 * (1.0 / 6 + d2 * (7.0 / 360 + d2 * (31.0 / 15120 + d2 * 127.0 / 604800)));
    }
    return d / std::sin(d) - 1.0;
}
double dsin_m1_prime(double d) {
    if (d < 0.05) {
        const double d2 = d * d;
        return d * (1.0 / 3 + d2 * (7.0 / 90 + d2 * (31.0 / 2520 + d2 * 127.0 / 75600)));
    }
    const double s = std::sin(d);
    return (s - d * std::cos(d)) / (s * s);
}

// sinh(s)/s - 1 and its derivative.
double sinhc_m1(double s) {
    if (s < 0.05) {
        const double s2 = s * s;
        return s2 * (1.0 / 6 + s2 * (1.0 / 120 + s2 * (1.0 / 5040 + s2 / 362880)));
    }
    return std::sinh(s) / s - 1.0;
}
double sinhc_m1_prime(double s) {
    if (s < 0.05) {
        const double s2 = s * s;
        return s * (1.0 / 3 + s2 * (1.0 / 30 + s2 * (1.0 / 840 + s2 / 45360)));
    }
    return (s * std::cosh(s) - std::sinh(s)) / (s * s);
}

// Newton iteration for g(x) = 0 from x, kept inside [lo, hi].
template <class G>
double newton(G g, double x, double lo, double hi) {
    for (int it = 0; it < 60; ++it) {
        const auto [v, dv] = g(x);
        if (v == 0.0 || !(dv != 0.0)) return x;
        double next = x - v / dv;
        if (!(next > lo)) next = 0.5 * (x + lo);
        if (!(next < hi)) next = 0.5 * (x + hi);
        if (std::abs(next - x) <= 2e-16 * std::abs(next)) return next;
        x = next;
    }
    return x;
}

struct ValDeriv {
    double v, dv;
};

// d in [0, pi) with d/sin d - 1 = c
double inv_dsin(double c) {
    if (c <= 0.0) return 0.0;
    if (c < 1.0) {
        return newton([c](double d) { return ValDeriv{dsin_m1(d) - c, dsin_m1_prime(d)}; },
                      std::sqrt(6.0 * c / (1.0 + 0.7 * c)), 0.0, M_PI);
    }
    // Near pi: solve log((pi - y)/sin y) = log(1 + c) for w = log y, y = pi - d.
    const double target = std::log1p(c);
    const double w = newton(
        [target](double w) {
            const double y = std::exp(w);
            const double v = std::log((M_PI - y) / std::sin(y)) - target;
            const double dv = y * (-1.0 / (M_PI - y) - std::cos(y) / std::sin(y));
            return ValDeriv{v, dv};
        },
        std::log(M_PI / (c + 2.0)), -745.0, std::log(M_PI));
    return M_PI - std::exp(w);
}

// s >= 0 with sinh(s)/s - 1 = c
double inv_sinhc(double c) {
    if (c <= 0.0) return 0.0;
    if (c < 1.0) {
        return newton([c](double s) { return ValDeriv{sinhc_m1(s) - c, sinhc_m1_prime(s)}; }, std::sqrt(6.0 * c), 0.0,
                      3.0);
    }
    // log(sinh s / s) = log(1 + c), nearly linear in s
    const double target = std::log1p(c);
    const double L = std::log(2.0 * (1.0 + c));
    return newton(
        [target](double s) {
            const double v = log_sinh(s) - std::log(s) - target;
            const double dv = 1.0 / std::tanh(s) - 1.0 / s;
            return ValDeriv{v, dv};
        },
        L + std::log(L), 1e-3, 800.0);
}

// Point xi = s + i(pi - d) on the constant-phase curve
//   d / sin d = p sinh(s) / s,  p = r t,
// and the derivative of xi with respect to the curve parameter.
struct CurvePoint {
    double s, d;
    std::complex<double> dxi;
};

// p >= 1: parametrised by s, starting from the saddle on the imaginary axis.
CurvePoint curve_by_s(double p, double s) {
    const double c = (p - 1.0) + p * sinhc_m1(s);
    const double d = inv_dsin(c);
    const double den = dsin_m1_prime(d);
    const double dd = den > 0.0 ? p * sinhc_m1_prime(s) / den : std::sqrt(p);
    return {s, d, {1.0, -dd}};
}

// p < 1: parametrised by d, starting from the saddle on Im xi = pi.
CurvePoint curve_by_d(double p, double d) {
    const double c = (dsin_m1(d) + 1.0) / p - 1.0;
    const double s = inv_sinhc(c);
    const double den = sinhc_m1_prime(s);
    const double ds = den > 0.0 ? dsin_m1_prime(d) / (p * den) : 0.0;
    return {s, d, {ds, -1.0}};
}

// Real part of -(xi - i pi)^2/(2t) - r cosh xi - r at xi = s + i(pi - d).
double re_phase(double r, double t, double s, double d) {
    const double sh = std::sinh(0.5 * s);
    const double sd = std::sin(0.5 * d);
    // cosh s cos d - 1, written without cancellation
    const double ccm1 = 2.0 * sh * sh * std::cos(d) - 2.0 * sd * sd;
    return (d * d - s * s) / (2.0 * t) + r * ccm1;
}

double im_phase(double r, double t, double s, double d) { return s * d / t - r * std::sinh(s) * std::sin(d); }

// Integrand along the curve, relative to e^{phase at the saddle}.
double curve_integrand(double r, double t, double phi0, const CurvePoint& c) {
    const double re = re_phase(r, t, c.s, c.d) - phi0;
    if (re < -700.0) return 0.0;
    const double mag = std::exp(re);
    const double ph = im_phase(r, t, c.s, c.d);
    // sinh(s + i(pi - d)) = -sinh s cos d + i cosh s sin d
    const std::complex<double> sinh_xi(-std::sinh(c.s) * std::cos(c.d), std::cosh(c.s) * std::sin(c.d));
    const std::complex<double> v = std::polar(mag, ph) * sinh_xi * c.dxi;
    return v.imag();
}

} // namespace

double log_theta_scaled(double r, double t) {
    if (!(r > 0.0) || !(t > 0.0) || !std::isfinite(r) || !std::isfinite(t))
        throw std::invalid_argument("theta: r and t must be positive and finite");
    if (t < kThetaTimeFloor) {
        throw NonConvergence("theta: rescaled time " + std::to_string(t) + " below supported floor " +
                                 std::to_string(kThetaTimeFloor),
                             "theta");
    }
    const double p = r * t;
    const bool by_s = p >= 1.0;
    auto point = [&](double u) { return by_s ? curve_by_s(p, u) : curve_by_d(p, u); };

    const CurvePoint start = point(0.0);
    const double phi0 = re_phase(r, t, start.s, start.d);

    // The phase decreases monotonically along the curve; cut where it has
    // dropped by 60 (e^-60 relative).
    auto drop = [&](double u) {
        const CurvePoint c = point(u);
        return re_phase(r, t, c.s, c.d) - phi0 + 60.0;
    };
    double lo = 0.0, hi;
    if (by_s) {
        hi = std::sqrt(t);
        while (drop(hi) > 0.0 && hi < 700.0) {
            lo = hi;
            hi *= 2.0;
        }
    } else {
        hi = M_PI * (1.0 - 1e-12);
        if (drop(hi) > 0.0) hi = M_PI * (1.0 - 1e-15);
    }
    for (int it = 0; it < 100 && hi - lo > 1e-3 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (drop(mid) > 0.0 ? lo : hi) = mid;
    }
    const double upper = hi;

    QuadratureSpec spec;
    spec.abs_tol = 1e-300;
    // Rounding in the phase (terms of size r and pi^2/2t) sets the noise floor.
    spec.rel_tol = std::max(1e-12, 50.0 * std::numeric_limits<double>::epsilon() * (r + M_PI * M_PI / (2.0 * t)));
    spec.max_subdivisions = 2000;
    QuadResult q;
    try {
        q = integrate_1d([&](double u) { return curve_integrand(r, t, phi0, point(u)); }, 0.0, upper, spec);
    } catch (const NonConvergence& e) {
        throw NonConvergence(std::string("theta: ") + e.what(), "theta");
    }
    if (!(q.value > 0.0)) return -std::numeric_limits<double>::infinity();
    return std::log(r / std::sqrt(2.0 * M_PI * M_PI * M_PI * t)) + phi0 + std::log(q.value);
}

double theta(double r, double t) { return std::exp(log_theta_scaled(r, t) + r); }

double theta_oscillatory(double r, double t, const QuadratureSpec& spec) {
    if (!(r > 0.0) || !(t > 0.0)) throw std::invalid_argument("theta: r and t must be positive");
    // The e^{pi^2/(2t)} prefactor is folded into the exponent.
    const double lead = M_PI * M_PI / (2.0 * t);
    auto f = [&](double xi) {
        if (xi <= 0.0) return 0.0;
        const double e = lead - xi * xi / (2.0 * t) - r * std::cosh(xi) + log_sinh(xi);
        if (e < -690.0) return 0.0; // integrand below 1e-300
        return std::exp(e) * std::sin(M_PI * xi / t);
    };
    const QuadResult q = oscillatory_integrate(f, M_PI / t, 0.0, spec);
    return r / std::sqrt(2.0 * M_PI * M_PI * M_PI * t) * q.value;
}

} // namespace svolkit
