#include "svolkit/validation.hpp"

#include "svolkit/bessel3.hpp"
#include "svolkit/cli.hpp"
#include "svolkit/errors.hpp"
#include "svolkit/numerics.hpp"
#include "svolkit/oracles.hpp"
#include "svolkit/pricing.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace svolkit {

void ValidationReport::add(CheckResult c) {
    overall = overall && c.pass;
    checks.push_back(std::move(c));
}

void ValidationReport::append(const ValidationReport& other) {
    for (const CheckResult& c : other.checks) add(c);
}

namespace {

// Benchmark models.
ModelSpec lognormal_benchmark() {
    ModelSpec m;
    m.x0 = 1.0;
    m.y0 = 0.2;
    m.rho = -0.5;
    m.horizon = 1.0;
    m.vol = {VolKind::lognormal, 0.3};
    return m;
}

ModelSpec bessel3_benchmark() {
    ModelSpec m;
    m.x0 = 1.0;
    m.y0 = 1.0;
    m.rho = -0.3;
    m.horizon = 0.5;
    m.vol = {VolKind::bessel3, 0.0};
    return m;
}

ModelSpec constant_benchmark() {
    ModelSpec m;
    m.x0 = 1.0;
    m.rho = 0.0;
    m.horizon = 1.0;
    m.vol = {VolKind::constant, 0.2};
    return m;
}

constexpr double kLognormalT = 1.0;
constexpr double kBessel3T = 0.5;
constexpr double kConstantT = 1.0;

// r-range and node count for the mass integrals (log-uniform trapezoid)
constexpr double kMassLo = 1e-4;
constexpr double kMassHi = 1e4;
constexpr int kMassPoints = 1501;
// Each mixing-estimator path contributes a whole Gaussian in ln r, so its
// mass is 1 up to range truncation and rounding.  The range is wide enough
// that truncation is negligible.  kRoundingFloor is added to 3-stderr bands
// whose estimator is (near) deterministic, where the stderr is itself only
// rounding noise.
constexpr double kMcMassLo = 1e-15;
constexpr double kMcMassHi = 1e8;
constexpr int kMcMassPoints = 3001;
constexpr double kRoundingFloor = 1e-12;

LNModelParams ln_of(const ModelSpec& m) { return {m.x0, m.y0, m.vol.sigma, m.rho}; }

McSettings mc_with(const ValidationOptions& o, long paths, std::uint64_t stream) {
    McSettings mc;
    mc.n_paths = paths;
    mc.rng = RngSpec{o.seed, stream};
    mc.threads = o.threads;
    return mc;
}

LognormalSurface surface(const ModelSpec& m, double t, const ValidationOptions& o) {
    LognormalSurface::Options opt;
    opt.threads = o.threads;
    opt.log_theta = o.log_theta;
    return LognormalSurface(ln_of(m), t, opt);
}

CheckResult within(std::string name, double target, double measured, double tol) {
    const bool ok = std::isfinite(measured) && std::abs(measured - target) <= tol;
    return {std::move(name), target, measured, tol, ok};
}

CheckResult at_most(std::string name, double measured, double tol) {
    const bool ok = std::isfinite(measured) && measured <= tol;
    return {std::move(name), 0.0, measured, tol, ok};
}

std::string fmt(double v) {
    std::ostringstream s;
    s << v;
    return s.str();
}

// Log-uniform trapezoid of r g(r) in ln r.
double log_trapezoid(const std::function<std::vector<double>(const std::vector<double>&)>& density) {
    std::vector<double> r(kMassPoints);
    const double a = std::log(kMassLo), h = (std::log(kMassHi) - a) / (kMassPoints - 1);
    for (int i = 0; i < kMassPoints; ++i) r[i] = std::exp(a + i * h);
    const std::vector<double> g = density(r);
    double s = 0.0;
    for (int i = 0; i < kMassPoints; ++i) s += (i == 0 || i + 1 == kMassPoints ? 0.5 : 1.0) * r[i] * g[i];
    return s * h;
}

double constant_density(const ModelSpec& m, double t, double r) {
    const double s = m.vol.sigma * std::sqrt(t);
    const double z = (std::log(r / m.x0) + 0.5 * s * s) / s;
    return std::exp(-0.5 * z * z) / (std::sqrt(2.0 * M_PI) * r * s);
}

} // namespace

ValidationReport check_density_normalization(const ValidationOptions& o) {
    ValidationReport rep;
    const ModelSpec ln = lognormal_benchmark(), b3 = bessel3_benchmark(), cv = constant_benchmark();

    {
        const LognormalSurface s = surface(ln, kLognormalT, o);
        const double mass = log_trapezoid([&](const std::vector<double>& r) { return s.density(r); });
        rep.add(within("normalization.lognormal.closed_form", 1.0, mass, 0.002));
    }
    {
        const DensityEstimate m =
            density_mc_mass(ln, kLognormalT, kMcMassLo, kMcMassHi, kMcMassPoints, mc_with(o, o.paths, 101));
        rep.add(within("normalization.lognormal.mixing_mc", 1.0, m.density, 3.0 * m.stderr_ + kRoundingFloor));
    }
    {
        const double mass = log_trapezoid([&](const std::vector<double>& r) {
            std::vector<double> g(r.size());
            for (std::size_t i = 0; i < r.size(); ++i) g[i] = constant_density(cv, kConstantT, r[i]);
            return g;
        });
        rep.add(within("normalization.constant.closed_form", 1.0, mass, 0.002));
    }
    {
        const DensityEstimate m =
            density_mc_mass(cv, kConstantT, kMcMassLo, kMcMassHi, kMcMassPoints, mc_with(o, o.paths, 102));
        rep.add(within("normalization.constant.mixing_mc", 1.0, m.density, 3.0 * m.stderr_ + kRoundingFloor));
    }
    {
        Bes3QmcSettings q;
        q.rng = RngSpec{o.seed, 103};
        q.threads = o.threads;
        const DensityEstimate m = bes3_density_mass(b3, kBessel3T, kMassLo, kMassHi, kMassPoints, q);
        rep.add(within("normalization.bessel3.closed_form", 1.0, m.density, 0.002));
    }
    {
        const DensityEstimate m =
            density_mc_mass(b3, kBessel3T, kMcMassLo, kMcMassHi, kMcMassPoints, mc_with(o, o.paths, 104));
        rep.add(within("normalization.bessel3.mixing_mc", 1.0, m.density, 3.0 * m.stderr_ + kRoundingFloor));
    }
    return rep;
}

ValidationReport check_closed_form_vs_mc_density(const ValidationOptions& o) {
    ValidationReport rep;
    const ModelSpec ln = lognormal_benchmark();
    const std::vector<double> r = {0.8, 1.0, 1.2};
    const LognormalSurface s = surface(ln, kLognormalT, o);
    const std::vector<double> exact = s.density(r);
    const auto mc = density_mc(ln, kLognormalT, r, mc_with(o, o.paths, 201));
    for (std::size_t i = 0; i < r.size(); ++i)
        rep.add(within("closed_vs_mc.lognormal.r=" + fmt(r[i]), exact[i], mc[i].density, 3.0 * mc[i].stderr_));
    return rep;
}

ValidationReport check_black_scholes_degeneration(const ValidationOptions& o) {
    ValidationReport rep;
    const ModelSpec cv = constant_benchmark();
    const std::vector<double> r = {0.5, 0.8, 1.0, 1.2, 1.5};
    const auto mc = density_mc(cv, kConstantT, r, mc_with(o, 4096, 301));
    double worst_density = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
        const double bs = constant_density(cv, kConstantT, r[i]);
        worst_density = std::max(worst_density, std::abs(mc[i].density - bs) / bs);
    }
    rep.add(at_most("black_scholes.density.max_rel_error", worst_density, 1e-10));

    const std::vector<double> strikes = {0.8, 0.9, 1.0, 1.1, 1.2};
    double worst_price = 0.0;
    for (OptionKind kind : {OptionKind::call, OptionKind::put}) {
        const auto q = price_mixing_mc(cv, kConstantT, strikes, kind, mc_with(o, 4096, 302));
        for (std::size_t i = 0; i < strikes.size(); ++i) {
            const double bs = black_scholes_price(cv.x0, strikes[i], cv.vol.sigma, kConstantT, kind);
            worst_price = std::max(worst_price, std::abs(q[i].value - bs) / bs);
        }
    }
    rep.add(at_most("black_scholes.price.max_rel_error", worst_price, 1e-12));
    return rep;
}

ValidationReport check_matsumoto_yor_law(const ValidationOptions& o) {
    ValidationReport rep;
    constexpr double t = 1.0;
    constexpr int n = 20;
    std::vector<double> xe(n + 1), ue(n + 1);
    for (int i = 0; i <= n; ++i) {
        xe[i] = -3.0 + 5.0 * i / n;
        ue[i] = -2.0 + 4.0 * i / n;
    }
    McSettings mc = mc_with(o, o.histogram_paths, 401);
    mc.n_steps = o.histogram_steps;
    const CellHistogram h = my_histogram_mc(t, xe, ue, mc);
    const std::vector<double> p = my_cell_masses(t, xe, ue, 8, o.log_theta);
    int passing = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        // binomial standard error of the cell frequency under the G_1 cell mass
        const double se = std::sqrt(std::max(p[i], 0.0) * (1.0 - p[i]) / static_cast<double>(h.n_paths));
        if (std::abs(h.freq[i] - p[i]) <= 3.0 * se) ++passing;
    }
    const double frac = static_cast<double>(passing) / p.size();
    rep.add({"matsumoto_yor.cells_within_3se", 1.0, frac, 0.05, frac >= 0.95});
    return rep;
}

ValidationReport check_brownian_kernels(const ValidationOptions& o) {
    ValidationReport rep;
    std::uint64_t stream = 500;
    QuadratureSpec q;
    q.abs_tol = 1e-13;
    q.rel_tol = 1e-12;
    double worst_identity = 0.0;
    for (double b : {0.5, 1.0})
        for (double c : {0.0, 0.7})
            for (double t : {0.5, 1.0})
                for (double x : {0.0, 1.0}) {
                    const std::string tag = "b=" + fmt(b) + ",c=" + fmt(c) + ",t=" + fmt(t) + ",x=" + fmt(x);
                    const double a1 = eq_a1(b, c, t, x);
                    const McEstimate m1 = mc_eq_a1(b, c, t, x, mc_with(o, o.kernel_paths, ++stream));
                    rep.add(within("kernels.eq_a1." + tag, a1, m1.mean, 3.0 * m1.stderr_));

                    // bridge endpoint: y = 1 for c = 0, y = -0.5 otherwise
                    const double y = c == 0.0 ? 1.0 : -0.5;
                    const double a2 = eq_a2(b, t, x, y);
                    const McEstimate m2 = mc_eq_a2_bridge(b, t, x, y, mc_with(o, o.kernel_paths, ++stream));
                    rep.add(within("kernels.eq_a2.b=" + fmt(b) + ",t=" + fmt(t) + ",x=" + fmt(x) + ",y=" + fmt(y),
                                   a2, m2.mean, 3.0 * m2.stderr_));

                    const double sd = std::sqrt(t);
                    const double lhs =
                        integrate_1d(
                            [&](double z) {
                                const double d = (z - x) / sd;
                                return std::exp(-0.5 * d * d - c * z * z + log_eq_a2(b, t, x, z)) /
                                       (sd * std::sqrt(2.0 * M_PI));
                            },
                            x - 40.0 * sd, x + 40.0 * sd, q)
                            .value;
                    worst_identity = std::max(worst_identity, std::abs(lhs - a1));
                }
    rep.add(at_most("kernels.identity.max_abs_error", worst_identity, 1e-8));
    return rep;
}

ValidationReport check_bes3_laplace_transform(const ValidationOptions& o) {
    ValidationReport rep;
    std::uint64_t stream = 600;
    for (double lambda : {0.25, 0.5, 1.0})
        for (double b : {0.25, 0.5, 1.0})
            for (double t : {0.5, 1.0}) {
                const Bes3LaplacePoint pt{lambda, b, t};
                const double exact = bes3_laplace(pt);
                const McEstimate m = mc_bes3_laplace(pt, mc_with(o, o.kernel_paths, ++stream));
                rep.add(within("bes3_laplace.lambda=" + fmt(lambda) + ",b=" + fmt(b) + ",t=" + fmt(t), exact, m.mean,
                               3.0 * m.stderr_));
            }
    return rep;
}

ValidationReport check_joint_density_inversion(const ValidationOptions&) {
    ValidationReport rep;
    constexpr double t = 1.0;
    QuadratureSpec q;
    q.rel_tol = 1e-9;
    q.abs_tol = 1e-12;
    for (double z : {0.0, 1.0}) {
        for (double c : {0.5, 1.0, 2.0}) {
            const double lt =
                integrate_1d([&](double y) { return std::exp(-c * y) * joint_bm_density(z, y, t); }, 0.0,
                             std::numeric_limits<double>::infinity(), q)
                    .value;
            rep.add(within("inversion.round_trip.z=" + fmt(z) + ",c=" + fmt(c), h_star(t, c, z), lt, 1e-4));
        }
        const double marginal = integrate_1d([&](double y) { return joint_bm_density(z, y, t); }, 0.0,
                                             std::numeric_limits<double>::infinity(), q)
                                    .value;
        rep.add(within("inversion.marginal.z=" + fmt(z), norm_pdf(z / std::sqrt(t)) / std::sqrt(t), marginal, 1e-3));
    }
    return rep;
}

ValidationReport check_option_pricing(const ValidationOptions& o) {
    ValidationReport rep;
    const ModelSpec ln = lognormal_benchmark();
    const std::vector<double> strikes = {0.8, 0.9, 1.0, 1.1, 1.2};
    const LognormalSurface s = surface(ln, kLognormalT, o);

    std::vector<double> calls;
    double worst_parity = 0.0;
    for (double k : strikes) {
        const double c = s.price(k, OptionKind::call), p = s.price(k, OptionKind::put);
        calls.push_back(c);
        worst_parity = std::max(worst_parity, std::abs(c - p - (ln.x0 - k)));
    }
    rep.add(at_most("pricing.parity.closed_form.max_abs", worst_parity, 2e-3));

    const auto mc = price_mixing_mc(ln, kLognormalT, strikes, OptionKind::call, mc_with(o, o.paths, 801));
    for (std::size_t i = 0; i < strikes.size(); ++i)
        rep.add(within("pricing.ladder.lognormal.K=" + fmt(strikes[i]), calls[i], mc[i].value, 3.0 * mc[i].stderr_));

    int violations = 0;
    for (std::size_t i = 1; i < calls.size(); ++i)
        if (calls[i] > calls[i - 1]) ++violations;
    for (std::size_t i = 2; i < calls.size(); ++i)
        if (calls[i] - 2.0 * calls[i - 1] + calls[i - 2] < 0.0) ++violations;
    // mixing-MC ladder: adjacent differences may not rise beyond 3 stderr
    for (std::size_t i = 1; i < mc.size(); ++i)
        if (mc[i].value - mc[i - 1].value > 3.0 * std::hypot(mc[i].stderr_, mc[i - 1].stderr_)) ++violations;
    rep.add(at_most("pricing.ladder.monotone_convex.violations", violations, 0.0));

    struct Case {
        std::string name;
        ModelSpec m;
        double t;
    };
    const std::vector<Case> cases = {{"lognormal", ln, kLognormalT},
                                     {"bessel3", bessel3_benchmark(), kBessel3T},
                                     {"constant", constant_benchmark(), kConstantT}};
    std::uint64_t stream = 810;
    for (const Case& c : cases) {
        const McEstimate r = parity_residual_mc(c.m, c.t, 1.0, mc_with(o, o.paths, ++stream));
        rep.add(within("pricing.parity.mixing_mc." + c.name, 0.0, r.mean, 3.0 * r.stderr_ + kRoundingFloor));
    }
    return rep;
}

ValidationReport check_martingale_regime(const ValidationOptions& o) {
    ValidationReport rep;
    struct Case {
        std::string name;
        ModelSpec m;
        double t;
    };
    const std::vector<Case> cases = {{"lognormal", lognormal_benchmark(), kLognormalT},
                                     {"bessel3", bessel3_benchmark(), kBessel3T},
                                     {"constant", constant_benchmark(), kConstantT}};
    std::uint64_t stream = 900;
    for (const Case& c : cases) {
        const MartingaleReport r = martingale_check(c.m, c.t, mc_with(o, o.paths, ++stream));
        rep.add(within("martingale.consistent." + c.name, 1.0, r.mean, 3.0 * r.stderr_ + kRoundingFloor));
    }

    ModelSpec pos = lognormal_benchmark();
    pos.rho = 0.5;
    pos.y0 = 1.0;
    pos.vol.sigma = 1.0;
    const MartingaleReport r = martingale_check(pos, 1.0, mc_with(o, o.martingale_paths, 910));
    // measured: shortfall 1 - mean; must exceed 3 stderr
    rep.add({"martingale.positive_rho.shortfall", 0.0, 1.0 - r.mean, 3.0 * r.stderr_,
             std::isfinite(r.mean) && 1.0 - r.mean > 3.0 * r.stderr_});

    int refused = 0;
    try {
        price_mixing_mc(pos, {1.0, 1.0, OptionKind::call}, mc_with(o, 1024, 911));
    } catch (const MartingaleViolation&) {
        ++refused;
    }
    try {
        vanilla_closed_form(ln_of(pos), 1.0, 1.0, OptionKind::call);
    } catch (const MartingaleViolation&) {
        ++refused;
    }
    try {
        payoff_mc_price(pos, {1.0, 1.0, OptionKind::call}, mc_with(o, 1024, 912));
    } catch (const MartingaleViolation&) {
        ++refused;
    }
    rep.add({"martingale.positive_rho.pricing_refused", 3.0, static_cast<double>(refused), 0.0, refused == 3});
    return rep;
}

ValidationReport check_determinism(const ValidationOptions& o) {
    ValidationReport rep;
    auto run = [&](RunConfig c, int threads) {
        c.threads = threads;
        return cmd_density(c);
    };
    RunConfig b3;
    b3.model = bessel3_benchmark();
    b3.t = kBessel3T;
    b3.method = Method::mixing_mc;
    b3.n_paths = 20000;
    b3.seed = o.seed;
    RunConfig ln;
    ln.model = lognormal_benchmark();
    ln.t = kLognormalT;
    ln.method = Method::mixing_mc;
    ln.n_paths = 20000;
    ln.seed = o.seed;
    RunConfig qmc = b3;
    qmc.method = Method::closed_form;

    int mismatches = 0;
    for (const RunConfig* c : {&b3, &ln, &qmc}) {
        const std::string ref = run(*c, 1);
        for (int threads : {1, 2, 4})
            if (run(*c, threads) != ref) ++mismatches;
    }
    rep.add(at_most("determinism.csv_mismatches", mismatches, 0.0));
    return rep;
}

ValidationReport check_g_normalization(const ValidationOptions& o) {
    ValidationReport rep;
    for (double tau : {0.5, 1.0, 2.0}) {
        LognormalSurface::Options opt;
        opt.threads = o.threads;
        opt.log_theta = o.log_theta;
        const LognormalSurface s({1.0, 1.0, 1.0, 0.0}, tau, opt);
        rep.add(within("g_normalization.t=" + fmt(tau), 1.0, s.mass(), 1e-6));
    }
    return rep;
}

const std::vector<SuiteEntry>& validation_suite() {
    static const std::vector<SuiteEntry> suite = {
        {"density_normalization", check_density_normalization},
        {"closed_form_vs_mc_density", check_closed_form_vs_mc_density},
        {"black_scholes_degeneration", check_black_scholes_degeneration},
        {"matsumoto_yor_law", check_matsumoto_yor_law},
        {"brownian_kernels", check_brownian_kernels},
        {"bes3_laplace_transform", check_bes3_laplace_transform},
        {"joint_density_inversion", check_joint_density_inversion},
        {"option_pricing", check_option_pricing},
        {"martingale_regime", check_martingale_regime},
        {"determinism", check_determinism},
        {"g_normalization", check_g_normalization},
    };
    return suite;
}

ValidationReport run_validation(const ValidationOptions& o, const std::optional<std::vector<std::string>>& only) {
    const auto& suite = validation_suite();
    ValidationReport rep;
    if (!only) {
        for (const SuiteEntry& e : suite) rep.append(e.run(o));
        return rep;
    }
    std::vector<const SuiteEntry*> chosen;
    for (const std::string& name : *only) {
        const SuiteEntry* hit = nullptr;
        for (const SuiteEntry& e : suite)
            if (e.name == name) hit = &e;
        if (!hit) throw std::invalid_argument("unknown validation check '" + name + "'");
        chosen.push_back(hit);
    }
    for (const SuiteEntry* e : chosen) rep.append(e->run(o));
    return rep;
}

} // namespace svolkit
