#pragma once

#include "svolkit/numerics.hpp"

#include <functional>
#include <vector>

namespace svolkit {

// Smallest rescaled time t*sigma^2 accepted by the Hartman-Watson evaluator.
constexpr double kThetaTimeFloor = 1e-4;

// Hartman-Watson function
//   theta(r,t) = r / sqrt(2 pi^3 t) * exp(pi^2/(2t)) *
//                int_0^inf exp(-xi^2/(2t) - r cosh xi) sinh xi sin(pi xi / t) dxi.
// Evaluated on the constant-phase contour of the exponent, where the
// integrand does not oscillate.  Throws NonConvergence for t < kThetaTimeFloor.
double theta(double r, double t);

// log(theta(r,t) * e^{-r}); finite even where theta itself overflows.
double log_theta_scaled(double r, double t);

// The same function by summing the real-axis oscillatory integral between
// its zeros.  Loses accuracy quickly once t drops below ~0.2.
double theta_oscillatory(double r, double t, const QuadratureSpec& spec = {});

using LogThetaFn = std::function<double(double r, double t)>;

// Joint density of (V_t, A_t), V_t = W_t - t/2, A_t = int_0^t e^{2 V_s} ds:
//   G_t(x,y) = exp(-x/2 - t/8 - (1 + e^{2x})/(2y)) theta(e^x/y, t) / y.
double my_joint_density(double x, double y, double t);

// log G_t(x,y), with theta supplied by `log_theta` (log of the scaled theta).
double my_log_density(double x, double y, double t, const LogThetaFn& log_theta = log_theta_scaled);

struct LNModelParams {
    double x0 = 1.0;
    double y0 = 0.2;
    double sigma = 0.3;
    double rho = -0.5;

    void validate() const;
};

enum class OptionKind { call, put };

// Conditional moments of ln(X_t/X0) given V_{t sigma^2} = x and A_{t sigma^2} = y.
struct LnConditional {
    double mu;  // rho Y0 (e^x - 1)/sigma - Y0^2 y / (2 sigma^2)
    double var; // (1 - rho^2) Y0^2 y / sigma^2
};
LnConditional ln_conditional(const LNModelParams& p, double x, double y);

// Window [lo, hi] in u = ln y outside which y G_tau(x, e^u) is negligible
// (below 1e-19 of its peak).
struct UWindow {
    double lo, hi;
};
UWindow my_u_window(double x, double tau, const LogThetaFn& log_theta = log_theta_scaled);

// Range of x = V_tau used by the closed forms: mean -tau/2 plus/minus 8 sd.
UWindow my_x_range(double tau);

// Density of X_t as an iterated integral against G_{t sigma^2}: inner over
// u = ln y, outer over x.  For rho = 0 (and fast_path) the order is swapped
// so the x-integral gives the marginal of A.  Throws NonConvergence naming
// the failing axis.
double density_closed_form(const LNModelParams& p, double t, double r, const QuadratureSpec& spec = {},
                           bool fast_path = true);

// European call/put with zero rates.  Throws MartingaleViolation for rho > 0.
double vanilla_closed_form(const LNModelParams& p, double t, double strike, OptionKind kind,
                           const QuadratureSpec& spec = {});

// Tabulated form of the same integrals: G_{t sigma^2} is evaluated once on a
// Gauss-Legendre product grid (x nodes, per-x u = ln y nodes) and reused for
// any number of densities or strikes.
class LognormalSurface {
public:
    struct Options {
        int x_panels = 16; // 10-point Gauss-Legendre panels
        int u_panels = 8;
        int threads = 0;
        LogThetaFn log_theta = log_theta_scaled;
    };

    LognormalSurface(const LNModelParams& p, double t);
    LognormalSurface(const LNModelParams& p, double t, Options opt);

    double density(double r) const;
    std::vector<double> density(const std::vector<double>& r) const;
    double price(double strike, OptionKind kind) const;
    // sum of the quadrature weights times G: 1 up to discretisation error
    double mass() const { return mass_; }
    // E[e^{mu + var/2}] over the grid: 1 when the asset is a martingale
    double martingale_mass() const { return exp_mass_; }

private:
    struct Node {
        double w;   // quadrature weight times y G(x, y)
        double mu;  // conditional mean of ln(X_t/X0)
        double sd;  // conditional sd
    };
    LNModelParams p_;
    double t_;
    std::vector<Node> nodes_;
    double mass_ = 0.0;
    double exp_mass_ = 0.0;
};

} // namespace svolkit
