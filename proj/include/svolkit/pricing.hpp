#pragma once

#include "svolkit/lognormal.hpp"
#include "svolkit/model.hpp"

#include <string>
#include <vector>

namespace svolkit {

enum class PriceMethod { mixing_mc, payoff_mc, closed_form_lognormal, black_scholes };

std::string to_string(PriceMethod m);
std::string to_string(OptionKind k);
OptionKind option_kind_from_string(const std::string& s);

struct OptionSpec {
    double strike = 1.0;
    double maturity = 1.0;
    OptionKind kind = OptionKind::call;

    void validate() const;
};

struct PriceQuote {
    double value = 0.0;
    double stderr_ = 0.0; // zero for closed forms
    PriceMethod method = PriceMethod::mixing_mc;
    long n_paths = 0;
};

// Zero-rate Black-Scholes value; the intrinsic value when sigma sqrt(t) == 0.
double black_scholes_price(double x0, double strike, double sigma, double t, OptionKind kind);

// True when X is a true martingale: constant volatility, or rho <= 0.
bool martingale_predicate(const ModelSpec& model);

// Per-path Black-Scholes terms averaged over volatility paths:
//   call: X0 e^{mu_Z + s^2/2} Phi(d1) - K Phi(d2),
//   d1 = (ln(X0/K) + mu_Z + s^2)/s,  d2 = d1 - s,  s = sigma_Z;
//   put:  K Phi(-d2) - X0 e^{mu_Z + s^2/2} Phi(-d1).
// Throws MartingaleViolation when the predicate fails, unless
// allow_local_martingale is set.
PriceQuote price_mixing_mc(const ModelSpec& model, const OptionSpec& opt, const McSettings& mc,
                           bool allow_local_martingale = false);

// The same estimator for several strikes on one set of paths.
std::vector<PriceQuote> price_mixing_mc(const ModelSpec& model, double t, const std::vector<double>& strikes,
                                        OptionKind kind, const McSettings& mc, bool allow_local_martingale = false);

// Plain payoff average over asset_terminal_mc samples.
PriceQuote payoff_mc_price(const ModelSpec& model, const OptionSpec& opt, const McSettings& mc,
                           bool allow_local_martingale = false);

struct McEstimate {
    double mean = 0.0;
    double stderr_ = 0.0;
};

// call - put - (X0 - K) from the mixing estimator, formed path by path.
McEstimate parity_residual_mc(const ModelSpec& model, double t, double strike, const McSettings& mc);

enum class MartingaleVerdict { martingale_consistent, supermartingale_suspect };
std::string to_string(MartingaleVerdict v);

struct MartingaleReport {
    double mean = 0.0; // estimate of E[X_t]/X0
    double stderr_ = 0.0;
    MartingaleVerdict verdict = MartingaleVerdict::martingale_consistent;
};

// E[X_t]/X0 via the conditional mean e^{mu_Z + sigma_Z^2/2} on each path;
// martingale_consistent iff |mean - 1| <= 3 stderr.
MartingaleReport martingale_check(const ModelSpec& model, double t, const McSettings& mc);

// Closed-form lognormal price wrapped as a quote.
PriceQuote price_closed_form_lognormal(const LNModelParams& p, const OptionSpec& opt, const QuadratureSpec& spec = {});

} // namespace svolkit
