#pragma once

#include "svolkit/model.hpp"
#include "svolkit/numerics.hpp"

#include <complex>
#include <vector>

namespace svolkit {

// E[exp(-c B_t^2 - (b^2/2) int_0^t B_u^2 du)] for a Brownian motion B_0 = x:
//   (cosh bt + (2c/b) sinh bt)^{-1/2}
//     * exp(-(x^2/2) (b tanh bt + 2c) / (1 + (2c/b) tanh bt)).
// Evaluated in log space; b > 0, c >= 0, t > 0.
double eq_a1(double b, double c, double t, double x);
double log_eq_a1(double b, double c, double t, double x);

// H_{b,t,x}(y) = E[exp(-(b^2/2) int_0^t B_u^2 du) | B_0 = x, B_t = y]
//   = sqrt(bt / sinh bt)
//     * exp(-[(y - x)^2 (bt coth bt - 1) + 2 bt x y tanh(bt/2)] / (2t)).
double eq_a2(double b, double t, double x, double y);
double log_eq_a2(double b, double t, double x, double y);

// H*(t, c, z) = (2 pi)^{-1/2} sqrt(w / sinh(t w)) exp(-(z^2/2) w coth(t w)),
// w = sqrt(2c): the Laplace transform in y of the joint density g(z, y) of
// (B_t, int_0^t B_u^2 du), B_0 = 0.  Continued analytically off the real axis.
std::complex<long double> h_star(double t, std::complex<long double> c, double z);
double h_star(double t, double c, double z);

struct Bes3LaplacePoint {
    double lambda;
    double b;
    double t;

    void validate() const;
};

// E[exp(-lambda int Y dZ - (b^2/2) int Y^2 du)] for BES(3) Y started at 1,
// using int Y dZ = (Y_t^2 - 1 - 3t)/2 and the Brownian motion from 1 killed
// at zero (method of images, H taken at x = +1 and x = -1):
//   int_0^inf y e^{-lambda (y^2 - 1 - 3t)/2}
//     [n_t(y - 1) H_{b,t,1}(y) - n_t(y + 1) H_{b,t,-1}(y)] dy,
// n_t the N(0, t) density.
double bes3_laplace(const Bes3LaplacePoint& point, const QuadratureSpec& spec = {});

// g(z, y) by numerical inversion of c -> H*(t, c, z) at y.
double joint_bm_density(double z, double y, double t, const LaplaceInversionSpec& inv = {});

// ---------------------------------------------------------------------------
// Exact sampling of Brownian functionals
// ---------------------------------------------------------------------------

// (B_t, int_0^t B du, int_0^t B^2 du) for B_0 = x.
struct BmFunctionals {
    double end = 0.0;
    double integral = 0.0;
    double integral_sq = 0.0;
};

// Brownian bridge on [0, t] expanded in the sine basis (Karhunen-Loeve),
// truncated after n_terms; the remainder enters through the exact Gaussian
// law of its two linear functionals and the mean of its square integral.
class BrownianKL {
public:
    BrownianKL(double t, int n_terms);

    int n_terms() const { return n_; }
    // normals used per path: n_terms coefficients + 2 for the remainder
    int normals_per_path() const { return n_ + 2; }

    // w_t: the increment B_t - x; eta: n_terms standard normals;
    // tail0, tail1: two more standard normals.
    BmFunctionals functionals(double x, double w_t, const double* eta, double tail0, double tail1) const;

private:
    double t_;
    int n_;
    std::vector<double> lin_;   // int_0^t BB du per unit coefficient
    std::vector<double> ulin_;  // int_0^t u BB du per unit coefficient
    std::vector<double> var_;   // eigenvalues t^2/(k pi)^2
    double l00_, l10_, l11_;    // Cholesky factor of the remainder covariance
    double sq_tail_;            // mean of the remainder's square integral
};

// ---------------------------------------------------------------------------
// Asset density under BES(3) volatility
// ---------------------------------------------------------------------------

// Randomly shifted rank-1 lattice (Korobov, 16381 points) over the normals
// of three independent Brownian paths, one started at 1 and two at 0.
struct Bes3QmcSettings {
    int n_shifts = 16;
    int kl_terms = 48;
    RngSpec rng;
    int threads = 0;
};

constexpr int kBes3LatticeSize = 16381;
constexpr int kBes3LatticeGenerator = 4312;

// Density of X_t: expectation over the three paths of
//   phi((ln(r/X0) - mu) / s) / (r s),
//   mu = (rho/2)(x* - 1 - 3t) - y*/2,  s^2 = (1 - rho^2) y*,
// x* = sum of squared endpoints, y* = sum of square integrals.
// The stderr is taken across the random shifts.
std::vector<DensityEstimate> bes3_asset_density(const ModelSpec& model, double t, const std::vector<double>& r_grid,
                                                const Bes3QmcSettings& qmc = {});

// Trapezoid integral of the density over a log-uniform r-grid on
// [r_lo, r_hi], with stderr across shifts.
DensityEstimate bes3_density_mass(const ModelSpec& model, double t, double r_lo, double r_hi, int n_points,
                                  const Bes3QmcSettings& qmc = {});

} // namespace svolkit
