#include "svolkit/errors.hpp"
#include "svolkit/lognormal.hpp"
#include "svolkit/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace svolkit {

void LNModelParams::validate() const {
    if (!(x0 > 0.0) || !std::isfinite(x0)) throw std::invalid_argument("lognormal: x0 must be positive");
    if (!(y0 > 0.0) || !std::isfinite(y0)) throw std::invalid_argument("lognormal: y0 must be positive");
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw std::invalid_argument("lognormal: sigma must be positive");
    if (!(std::abs(rho) < 1.0)) throw std::invalid_argument("lognormal: rho must lie in (-1, 1)");
}

double my_log_density(double x, double y, double t, const LogThetaFn& log_theta) {
    if (!(y > 0.0) || !(t > 0.0)) throw std::invalid_argument("my_log_density: y and t must be positive");
    if (!std::isfinite(x) || !std::isfinite(y)) return -std::numeric_limits<double>::infinity();
    const double log_y = std::log(y);
    const double log_r = x - log_y;
    // theta(r, t) vanishes like r as r -> 0; beyond these bounds G is zero to double precision
    if (log_r < -700.0 || log_r > 700.0) return -std::numeric_limits<double>::infinity();
    // -(1 + e^{2x})/(2y) + r, with theta = e^{r} * scaled theta
    const double em1 = std::expm1(x);
    return -0.5 * x - t / 8.0 - em1 * em1 / (2.0 * y) + log_theta(std::exp(log_r), t) - log_y;
}

double my_joint_density(double x, double y, double t) { return std::exp(my_log_density(x, y, t)); }

LnConditional ln_conditional(const LNModelParams& p, double x, double y) {
    const double a = p.y0 / p.sigma;
    return {p.rho * a * std::expm1(x) - 0.5 * a * a * y, (1.0 - p.rho * p.rho) * a * a * y};
}

UWindow my_x_range(double tau) {
    const double half = 8.0 * std::sqrt(tau);
    return {-0.5 * tau - half, -0.5 * tau + half};
}

UWindow my_u_window(double x, double tau, const LogThetaFn& log_theta) {
    if (!(tau > 0.0)) throw std::invalid_argument("my_u_window: tau must be positive");
    // log A for the straight path V_s = x s / tau
    const double centre = std::abs(x) < 1e-12 ? std::log(tau) : std::log(tau * std::expm1(2.0 * x) / (2.0 * x));
    const double h = std::min(0.5, 0.5 * std::sqrt(tau));
    auto f = [&](double u) { return u + my_log_density(x, std::exp(u), tau, log_theta); };
    constexpr double kDrop = 42.0;
    constexpr int kMaxSteps = 400;

    double peak = f(centre);
    if (std::isnan(peak)) throw NonFiniteIntegrand("my_u_window: NaN density");
    auto scan = [&](double dir) {
        double u = centre;
        for (int i = 0; i < kMaxSteps; ++i) {
            u += dir * h;
            const double v = f(u);
            if (std::isnan(v)) throw NonFiniteIntegrand("my_u_window: NaN density");
            if (v > peak) peak = v;
            if (v < peak - kDrop) return u;
        }
        throw NonConvergence("my_u_window: density does not decay at x = " + std::to_string(x), "u");
    };
    const double hi = scan(1.0);
    const double lo = scan(-1.0);
    if (!std::isfinite(peak)) throw NonConvergence("my_u_window: density vanishes at x = " + std::to_string(x), "u");
    return {lo, hi};
}

namespace {

void check_time(const LNModelParams& p, double t) {
    p.validate();
    if (!(t > 0.0) || !std::isfinite(t)) throw InvalidHorizon("lognormal: t must be positive");
}

QuadratureSpec inner_spec(const QuadratureSpec& spec) {
    QuadratureSpec s = spec;
    s.abs_tol = spec.abs_tol * 0.1;
    s.truncation = TailEstimate{};
    return s;
}

QuadResult integrate_axis(const RealFn& f, double lo, double hi, const QuadratureSpec& spec, const char* axis) {
    try {
        return integrate_1d(f, lo, hi, spec);
    } catch (const NonConvergence& e) {
        if (!e.axis().empty() && e.axis() != axis) throw;
        throw NonConvergence(std::string("lognormal closed form: ") + e.what(), axis);
    }
}

// E[kernel(mu, var)] over (V_tau, A_tau) ~ G_tau, as iterated quadrature.
// With rho = 0 the kernel ignores x, so the x-integral is done first.
template <class Kernel>
double expect_over_my(const LNModelParams& p, double t, const QuadratureSpec& spec, bool fast_path, Kernel kernel) {
    spec.validate();
    const double tau = t * p.sigma * p.sigma;
    const UWindow xr = my_x_range(tau);
    const QuadratureSpec in = inner_spec(spec);
    auto weight = [&](double x, double u) { return std::exp(u + my_log_density(x, std::exp(u), tau)); };

    if (fast_path && p.rho == 0.0) {
        double ulo = std::numeric_limits<double>::infinity(), uhi = -ulo;
        for (int i = 0; i <= 8; ++i) {
            const UWindow w = my_u_window(xr.lo + (xr.hi - xr.lo) * i / 8.0, tau);
            ulo = std::min(ulo, w.lo);
            uhi = std::max(uhi, w.hi);
        }
        auto outer = [&](double u) {
            const double y = std::exp(u);
            const LnConditional c = ln_conditional(p, 0.0, y);
            const double k = kernel(c.mu, c.var);
            if (k == 0.0) return 0.0;
            const auto m = integrate_axis([&](double x) { return weight(x, u); }, xr.lo, xr.hi, in, "x");
            return k * m.value;
        };
        return integrate_axis(outer, ulo, uhi, spec, "u").value;
    }

    auto outer = [&](double x) {
        const UWindow w = my_u_window(x, tau);
        auto inner = [&](double u) {
            const double g = weight(x, u);
            if (g == 0.0) return 0.0;
            const LnConditional c = ln_conditional(p, x, std::exp(u));
            return g * kernel(c.mu, c.var);
        };
        return integrate_axis(inner, w.lo, w.hi, in, "u").value;
    };
    return integrate_axis(outer, xr.lo, xr.hi, spec, "x").value;
}

double call_kernel(double x0, double strike, double mu, double var) {
    const double s = std::sqrt(var);
    const double d1 = (std::log(x0 / strike) + mu + var) / s;
    return x0 * std::exp(mu + 0.5 * var) * norm_cdf(d1) - strike * norm_cdf(d1 - s);
}

double put_kernel(double x0, double strike, double mu, double var) {
    const double s = std::sqrt(var);
    const double d1 = (std::log(x0 / strike) + mu + var) / s;
    return strike * norm_cdf(s - d1) - x0 * std::exp(mu + 0.5 * var) * norm_cdf(-d1);
}

void require_martingale(const LNModelParams& p) {
    if (p.rho > 0.0) {
        throw MartingaleViolation("lognormal: rho > 0 makes the asset a strict local martingale; "
                                  "option values would not be arbitrage prices");
    }
}

} // namespace

double density_closed_form(const LNModelParams& p, double t, double r, const QuadratureSpec& spec, bool fast_path) {
    check_time(p, t);
    if (!(r > 0.0) || !std::isfinite(r)) throw std::invalid_argument("density_closed_form: r must be positive");
    const double lr = std::log(r / p.x0);
    return expect_over_my(p, t, spec, fast_path, [&](double mu, double var) {
        const double s = std::sqrt(var);
        return norm_pdf((lr - mu) / s) / (r * s);
    });
}

double vanilla_closed_form(const LNModelParams& p, double t, double strike, OptionKind kind,
                           const QuadratureSpec& spec) {
    check_time(p, t);
    require_martingale(p);
    if (!(strike > 0.0) || !std::isfinite(strike))
        throw std::invalid_argument("vanilla_closed_form: strike must be positive");
    return expect_over_my(p, t, spec, true, [&](double mu, double var) {
        return kind == OptionKind::call ? call_kernel(p.x0, strike, mu, var) : put_kernel(p.x0, strike, mu, var);
    });
}

// ---------------------------------------------------------------------------
// Tabulated surface
// ---------------------------------------------------------------------------

namespace {
constexpr int kRuleOrder = 10;
}

LognormalSurface::LognormalSurface(const LNModelParams& p, double t) : LognormalSurface(p, t, Options{}) {}

LognormalSurface::LognormalSurface(const LNModelParams& p, double t, Options opt) : p_(p), t_(t) {
    check_time(p, t);
    if (opt.x_panels < 1 || opt.u_panels < 1) throw std::invalid_argument("LognormalSurface: panels must be >= 1");
    if (!opt.log_theta) opt.log_theta = log_theta_scaled;
    const double tau = t * p.sigma * p.sigma;
    const UWindow xr = my_x_range(tau);
    const GaussRule rule = gauss_legendre(kRuleOrder);

    std::vector<double> xs, wx;
    const double hx = (xr.hi - xr.lo) / opt.x_panels;
    for (int k = 0; k < opt.x_panels; ++k) {
        for (int i = 0; i < kRuleOrder; ++i) {
            xs.push_back(xr.lo + hx * (k + 0.5 * (rule.nodes[i] + 1.0)));
            wx.push_back(0.5 * hx * rule.weights[i]);
        }
    }

    std::vector<std::vector<Node>> per_x(xs.size());
    auto build = [&](std::size_t j) {
        const double x = xs[j];
        const UWindow w = my_u_window(x, tau, opt.log_theta);
        const double hu = (w.hi - w.lo) / opt.u_panels;
        auto& out = per_x[j];
        out.reserve(static_cast<std::size_t>(opt.u_panels) * kRuleOrder);
        for (int k = 0; k < opt.u_panels; ++k) {
            for (int i = 0; i < kRuleOrder; ++i) {
                const double u = w.lo + hu * (k + 0.5 * (rule.nodes[i] + 1.0));
                const double y = std::exp(u);
                const double g = std::exp(u + my_log_density(x, y, tau, opt.log_theta));
                if (!std::isfinite(g)) throw NonFiniteIntegrand("LognormalSurface: non-finite G");
                if (g == 0.0) continue;
                const LnConditional c = ln_conditional(p, x, y);
                out.push_back({wx[j] * 0.5 * hu * rule.weights[i] * g, c.mu, std::sqrt(c.var)});
            }
        }
    };

    const int workers = std::max(1, std::min<int>(resolve_threads(opt.threads), static_cast<int>(xs.size())));
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto run = [&](int w) {
        try {
            for (std::size_t j = w; j < xs.size(); j += workers) build(j);
        } catch (...) {
            std::lock_guard<std::mutex> lock(failure_mutex);
            if (!failure) failure = std::current_exception();
        }
    };
    if (workers == 1) {
        run(0);
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(run, w);
        for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);

    for (const auto& v : per_x) nodes_.insert(nodes_.end(), v.begin(), v.end());
    for (const Node& n : nodes_) {
        mass_ += n.w;
        exp_mass_ += n.w * std::exp(n.mu + 0.5 * n.sd * n.sd);
    }
}

double LognormalSurface::density(double r) const {
    if (!(r > 0.0) || !std::isfinite(r)) throw std::invalid_argument("LognormalSurface: r must be positive");
    const double lr = std::log(r / p_.x0);
    double acc = 0.0;
    for (const Node& n : nodes_) acc += n.w * norm_pdf((lr - n.mu) / n.sd) / n.sd;
    return acc / r;
}

std::vector<double> LognormalSurface::density(const std::vector<double>& r) const {
    std::vector<double> out;
    out.reserve(r.size());
    for (double v : r) out.push_back(density(v));
    return out;
}

double LognormalSurface::price(double strike, OptionKind kind) const {
    require_martingale(p_);
    if (!(strike > 0.0) || !std::isfinite(strike))
        throw std::invalid_argument("LognormalSurface: strike must be positive");
    double acc = 0.0;
    for (const Node& n : nodes_) {
        const double var = n.sd * n.sd;
        acc += n.w * (kind == OptionKind::call ? call_kernel(p_.x0, strike, n.mu, var)
                                               : put_kernel(p_.x0, strike, n.mu, var));
    }
    return acc;
}

} // namespace svolkit
