#pragma once

#include <complex>
#include <functional>
#include <variant>
#include <vector>

namespace svolkit {

// ---------------------------------------------------------------------------
// Quadrature
// ---------------------------------------------------------------------------

struct FixedUpperBound {
    double upper;
};
struct TailEstimate {};

using TruncationPolicy = std::variant<TailEstimate, FixedUpperBound>;

struct QuadratureSpec {
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    int max_subdivisions = 400;
    // How an infinite upper limit is handled: TailEstimate maps [l, inf) onto
    // [0, 1) with x = l + u/(1-u); FixedUpperBound cuts the range at `upper`.
    TruncationPolicy truncation = TailEstimate{};

    void validate() const;
};

struct QuadResult {
    double value = 0.0;
    double err_est = 0.0;
};

using RealFn = std::function<double(double)>;

// Adaptive Gauss-Kronrod (7/15). Either limit may be infinite.
// Throws NonConvergence or NonFiniteIntegrand.
QuadResult integrate_1d(const RealFn& f, double lower, double upper, const QuadratureSpec& spec = {});

// Integral over [lower, inf) of f, where f = smooth * sin(frequency * x).
// Integrates between consecutive zeros k*pi/frequency and sums the
// alternating series with Euler (repeated averaging) acceleration.
QuadResult oscillatory_integrate(const RealFn& f, double frequency, double lower,
                                 const QuadratureSpec& spec = {});

struct GaussRule {
    std::vector<double> nodes;   // on [-1, 1], ascending
    std::vector<double> weights;
};

// n-point Gauss-Legendre rule (n >= 1).
GaussRule gauss_legendre(int n);

// ---------------------------------------------------------------------------
// Laplace inversion
// ---------------------------------------------------------------------------

// talbot: fixed Talbot contour (default).  gaver_stehfest: real-axis samples
// only.  euler: Abate-Whitt Fourier series on a vertical line with Euler
// summation; for transforms that do not decay in the left half-plane.
enum class LaplaceMethod { talbot, gaver_stehfest, euler };

struct LaplaceInversionSpec {
    LaplaceMethod method = LaplaceMethod::talbot;
    int n_terms = 32;
    // Invert c -> Lf(c + shift) and multiply by e^{shift*y}; for transforms
    // whose singularities lie to the right of the origin.
    double scale_shift = 0.0;

    void validate() const;
};

using cplx = std::complex<long double>;
using LaplaceTransform = std::function<cplx(cplx)>;

// Approximates f(y) from its Laplace transform.
// Throws UnstableInversion when Gaver-Stehfest cancellation exceeds 1e12.
double invert_laplace(const LaplaceTransform& Lf, double y, const LaplaceInversionSpec& spec = {});

// ---------------------------------------------------------------------------
// Standard normal
// ---------------------------------------------------------------------------

double norm_pdf(double x);
double norm_cdf(double x);
// Inverse CDF, Wichura's AS241 (PPND16).  p in (0,1).
double norm_quantile(double p);

// log cosh and log sinh without overflow (log_sinh requires x > 0).
double log_cosh(double x);
double log_sinh(double x);

} // namespace svolkit
