#pragma once

#include "svolkit/bessel3.hpp"
#include "svolkit/lognormal.hpp"
#include "svolkit/model.hpp"
#include "svolkit/pricing.hpp"

#include <vector>

namespace svolkit {

// Monte Carlo oracles for the closed forms.  Brownian functionals are drawn
// exactly through BrownianKL (48 terms) from pseudo-random normals, one
// engine per path as in model-core; mc.n_steps is ignored.

// E[exp(-c B_t^2 - (b^2/2) int B^2)] with B_0 = x.
McEstimate mc_eq_a1(double b, double c, double t, double x, const McSettings& mc);

// E[exp(-(b^2/2) int B^2) | B_0 = x, B_t = y] over Brownian bridges.
McEstimate mc_eq_a2_bridge(double b, double t, double x, double y, const McSettings& mc);

// E[exp(-lambda int Y dZ - (b^2/2) int Y^2)] with Y = |3-d Brownian motion|
// from (1, 0, 0), int Y dZ = (Y_t^2 - 1 - 3t)/2 and int Y^2 = sum of the
// coordinates' square integrals.
McEstimate mc_bes3_laplace(const Bes3LaplacePoint& point, const McSettings& mc);

// Cell frequencies of (V_t, ln A_t), V_t = W_t - t/2, A_t = int e^{2V}.
// Each step integrates e^{2V} along the chord between grid values, scaled by
// the Brownian-bridge mean factor exp(dt/3).  Row-major: ix * (nu) + iu.
struct CellHistogram {
    std::vector<double> x_edges;
    std::vector<double> u_edges;
    std::vector<double> freq;
    long n_paths = 0;

    std::size_t nx() const { return x_edges.size() - 1; }
    std::size_t nu() const { return u_edges.size() - 1; }
};
CellHistogram my_histogram_mc(double t, const std::vector<double>& x_edges, const std::vector<double>& u_edges,
                              const McSettings& mc);

// The same cells integrated against G_t (Gauss-Legendre of the given order
// per cell, in u = ln y).
std::vector<double> my_cell_masses(double t, const std::vector<double>& x_edges, const std::vector<double>& u_edges,
                                   int order = 8, const LogThetaFn& log_theta = log_theta_scaled);

} // namespace svolkit
