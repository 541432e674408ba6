#include "svolkit/pricing.hpp"
#include "svolkit/errors.hpp"
#include "svolkit/numerics.hpp"
#include "svolkit/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace svolkit {

std::string to_string(PriceMethod m) {
    switch (m) {
    case PriceMethod::mixing_mc: return "mixing_mc";
    case PriceMethod::payoff_mc: return "payoff_mc";
    case PriceMethod::closed_form_lognormal: return "closed_form_lognormal";
    case PriceMethod::black_scholes: return "black_scholes";
    }
    return "unknown";
}

std::string to_string(OptionKind k) { return k == OptionKind::call ? "call" : "put"; }

OptionKind option_kind_from_string(const std::string& s) {
    if (s == "call") return OptionKind::call;
    if (s == "put") return OptionKind::put;
    throw std::invalid_argument("unknown option kind '" + s + "'");
}

std::string to_string(MartingaleVerdict v) {
    return v == MartingaleVerdict::martingale_consistent ? "martingale_consistent" : "supermartingale_suspect";
}

void OptionSpec::validate() const {
    if (!(strike > 0.0) || !std::isfinite(strike)) throw std::invalid_argument("option: strike must be positive");
    if (!(maturity > 0.0) || !std::isfinite(maturity)) throw std::invalid_argument("option: maturity must be positive");
}

double black_scholes_price(double x0, double strike, double sigma, double t, OptionKind kind) {
    if (!(x0 > 0.0) || !(strike > 0.0) || !(sigma >= 0.0) || !(t >= 0.0))
        throw std::invalid_argument("black_scholes_price: inputs must be positive");
    const double s = sigma * std::sqrt(t);
    if (s == 0.0) return kind == OptionKind::call ? std::max(x0 - strike, 0.0) : std::max(strike - x0, 0.0);
    const double d1 = (std::log(x0 / strike) + 0.5 * s * s) / s;
    const double d2 = d1 - s;
    if (kind == OptionKind::call) return x0 * norm_cdf(d1) - strike * norm_cdf(d2);
    return strike * norm_cdf(-d2) - x0 * norm_cdf(-d1);
}

bool martingale_predicate(const ModelSpec& model) {
    return model.vol.kind == VolKind::constant || model.rho <= 0.0;
}

namespace {

void require_martingale(const ModelSpec& model, bool allow) {
    if (allow || martingale_predicate(model)) return;
    throw MartingaleViolation("rho > 0: the asset price loses the martingale property, so E[(X_t - K)^+] is not an "
                              "arbitrage price; pass --allow-local-martingale to compute it anyway");
}

double mixing_value(double x0, double strike, OptionKind kind, const MixingMoments& mm) {
    const double s = std::sqrt(mm.sigma_z2);
    const double fwd = x0 * std::exp(mm.mu_z + 0.5 * mm.sigma_z2);
    const double d1 = (std::log(x0 / strike) + mm.mu_z + mm.sigma_z2) / s;
    const double d2 = d1 - s;
    if (kind == OptionKind::call) return fwd * norm_cdf(d1) - strike * norm_cdf(d2);
    return strike * norm_cdf(-d2) - fwd * norm_cdf(-d1);
}

// Runs value(mixing moments, out) on every path and returns the moment sums.
template <class Value>
MomentSums over_paths(const ModelSpec& model, double t, const McSettings& mc, std::size_t k, Value value) {
    model.validate();
    check_horizon(model, t);
    if (mc.n_paths < 2) throw std::invalid_argument("pricing: need at least 2 paths");
    const int n_steps = mc.steps_for(t);
    return parallel_blocks(mc.n_paths, mc.threads, MomentSums(k), [&](long, long begin, long end) {
        MomentSums acc(k);
        std::vector<double> v(k);
        for (long p = begin; p < end; ++p) {
            auto gen = path_engine(mc.rng, static_cast<std::uint64_t>(p));
            const MixingMoments mm = mixing_moments(simulate_functionals(model, t, n_steps, gen), model.rho);
            if (!(mm.sigma_z2 > 0.0)) throw NonPositiveVol("pricing: path with zero integrated variance");
            value(mm, v);
            acc.add(v);
        }
        return acc;
    });
}

} // namespace

std::vector<PriceQuote> price_mixing_mc(const ModelSpec& model, double t, const std::vector<double>& strikes,
                                        OptionKind kind, const McSettings& mc, bool allow_local_martingale) {
    require_martingale(model, allow_local_martingale);
    for (double k : strikes)
        if (!(k > 0.0) || !std::isfinite(k)) throw std::invalid_argument("pricing: strikes must be positive");
    const MomentSums ms = over_paths(model, t, mc, strikes.size(), [&](const MixingMoments& mm, std::vector<double>& v) {
        for (std::size_t i = 0; i < strikes.size(); ++i) v[i] = mixing_value(model.x0, strikes[i], kind, mm);
    });
    std::vector<PriceQuote> out;
    for (std::size_t i = 0; i < strikes.size(); ++i)
        out.push_back({ms.mean(i), ms.stderr_of(i), PriceMethod::mixing_mc, mc.n_paths});
    return out;
}

PriceQuote price_mixing_mc(const ModelSpec& model, const OptionSpec& opt, const McSettings& mc,
                           bool allow_local_martingale) {
    opt.validate();
    return price_mixing_mc(model, opt.maturity, {opt.strike}, opt.kind, mc, allow_local_martingale).front();
}

PriceQuote payoff_mc_price(const ModelSpec& model, const OptionSpec& opt, const McSettings& mc,
                           bool allow_local_martingale) {
    opt.validate();
    require_martingale(model, allow_local_martingale);
    if (mc.n_paths < 2) throw std::invalid_argument("pricing: need at least 2 paths");
    const std::vector<double> xs = asset_terminal_mc(model, opt.maturity, mc);
    MomentSums ms(1);
    double v[1];
    for (double x : xs) {
        v[0] = opt.kind == OptionKind::call ? std::max(x - opt.strike, 0.0) : std::max(opt.strike - x, 0.0);
        ms.add(v);
    }
    return {ms.mean(0), ms.stderr_of(0), PriceMethod::payoff_mc, mc.n_paths};
}

McEstimate parity_residual_mc(const ModelSpec& model, double t, double strike, const McSettings& mc) {
    if (!(strike > 0.0) || !std::isfinite(strike)) throw std::invalid_argument("pricing: strike must be positive");
    const MomentSums ms = over_paths(model, t, mc, 1, [&](const MixingMoments& mm, std::vector<double>& v) {
        v[0] = mixing_value(model.x0, strike, OptionKind::call, mm) - mixing_value(model.x0, strike, OptionKind::put, mm) -
               (model.x0 - strike);
    });
    return {ms.mean(0), ms.stderr_of(0)};
}

MartingaleReport martingale_check(const ModelSpec& model, double t, const McSettings& mc) {
    const MomentSums ms = over_paths(model, t, mc, 1, [&](const MixingMoments& mm, std::vector<double>& v) {
        v[0] = std::exp(mm.mu_z + 0.5 * mm.sigma_z2);
    });
    MartingaleReport r;
    r.mean = ms.mean(0);
    r.stderr_ = ms.stderr_of(0);
    r.verdict = std::abs(r.mean - 1.0) <= 3.0 * r.stderr_ ? MartingaleVerdict::martingale_consistent
                                                            : MartingaleVerdict::supermartingale_suspect;
    return r;
}

PriceQuote price_closed_form_lognormal(const LNModelParams& p, const OptionSpec& opt, const QuadratureSpec& spec) {
    opt.validate();
    return {vanilla_closed_form(p, opt.maturity, opt.strike, opt.kind, spec), 0.0, PriceMethod::closed_form_lognormal,
            0};
}

} // namespace svolkit
