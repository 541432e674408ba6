#include "svolkit/oracles.hpp"
#include "svolkit/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace svolkit {

namespace {

constexpr int kOracleTerms = 48;

template <class Value>
McEstimate mc_mean(const McSettings& mc, Value value) {
    if (mc.n_paths < 2) throw std::invalid_argument("oracle: need at least 2 paths");
    const MomentSums ms = parallel_blocks(mc.n_paths, mc.threads, MomentSums(1), [&](long, long begin, long end) {
        MomentSums acc(1);
        double v[1];
        for (long p = begin; p < end; ++p) {
            auto gen = path_engine(mc.rng, static_cast<std::uint64_t>(p));
            v[0] = value(gen);
            acc.add(v);
        }
        return acc;
    });
    return {ms.mean(0), ms.stderr_of(0)};
}

// One Brownian path's functionals with fresh normals from gen.
BmFunctionals draw(const BrownianKL& kl, double x, double w_t, std::mt19937_64& gen, std::vector<double>& eta) {
    std::normal_distribution<double> normal;
    for (double& e : eta) e = normal(gen);
    const double a = normal(gen), b = normal(gen);
    return kl.functionals(x, w_t, eta.data(), a, b);
}

} // namespace

McEstimate mc_eq_a1(double b, double c, double t, double x, const McSettings& mc) {
    const BrownianKL kl(t, kOracleTerms);
    return mc_mean(mc, [&](std::mt19937_64& gen) {
        std::vector<double> eta(kOracleTerms);
        std::normal_distribution<double> normal;
        const double w = std::sqrt(t) * normal(gen);
        const BmFunctionals f = draw(kl, x, w, gen, eta);
        return std::exp(-c * f.end * f.end - 0.5 * b * b * f.integral_sq);
    });
}

McEstimate mc_eq_a2_bridge(double b, double t, double x, double y, const McSettings& mc) {
    const BrownianKL kl(t, kOracleTerms);
    return mc_mean(mc, [&](std::mt19937_64& gen) {
        std::vector<double> eta(kOracleTerms);
        const BmFunctionals f = draw(kl, x, y - x, gen, eta);
        return std::exp(-0.5 * b * b * f.integral_sq);
    });
}

McEstimate mc_bes3_laplace(const Bes3LaplacePoint& pt, const McSettings& mc) {
    pt.validate();
    const double t = pt.t;
    const BrownianKL kl(t, kOracleTerms);
    return mc_mean(mc, [&](std::mt19937_64& gen) {
        std::vector<double> eta(kOracleTerms);
        std::normal_distribution<double> normal;
        double y2 = 0.0, iy2 = 0.0;
        for (int k = 0; k < 3; ++k) {
            const double w = std::sqrt(t) * normal(gen);
            const BmFunctionals f = draw(kl, k == 0 ? 1.0 : 0.0, w, gen, eta);
            y2 += f.end * f.end;
            iy2 += f.integral_sq;
        }
        return std::exp(-0.5 * pt.lambda * (y2 - 1.0 - 3.0 * t) - 0.5 * pt.b * pt.b * iy2);
    });
}

namespace {

struct Counts {
    std::vector<long> c;
    void merge(const Counts& o) {
        for (std::size_t i = 0; i < c.size(); ++i) c[i] += o.c[i];
    }
};

long find_cell(const std::vector<double>& edges, double v) {
    if (!(v >= edges.front()) || !(v < edges.back())) return -1;
    return static_cast<long>(std::upper_bound(edges.begin(), edges.end(), v) - edges.begin()) - 1;
}

void check_edges(const std::vector<double>& e, const char* name) {
    if (e.size() < 2) throw std::invalid_argument(std::string("histogram: ") + name + " needs >= 2 edges");
    for (std::size_t i = 1; i < e.size(); ++i)
        if (!(e[i] > e[i - 1])) throw std::invalid_argument(std::string("histogram: ") + name + " must increase");
}

} // namespace

CellHistogram my_histogram_mc(double t, const std::vector<double>& x_edges, const std::vector<double>& u_edges,
                              const McSettings& mc) {
    if (!(t > 0.0)) throw std::invalid_argument("my_histogram_mc: t must be positive");
    check_edges(x_edges, "x_edges");
    check_edges(u_edges, "u_edges");
    if (mc.n_paths < 1) throw std::invalid_argument("my_histogram_mc: need paths");
    const int n_steps = mc.steps_for(t);
    const double dt = t / n_steps, sdt = std::sqrt(dt);
    const double bridge = std::exp(dt / 3.0);
    const std::size_t nu = u_edges.size() - 1, cells = (x_edges.size() - 1) * nu;

    const Counts total = parallel_blocks(mc.n_paths, mc.threads, Counts{std::vector<long>(cells, 0)},
                                         [&](long, long begin, long end) {
                                             Counts acc{std::vector<long>(cells, 0)};
                                             std::normal_distribution<double> normal;
                                             for (long p = begin; p < end; ++p) {
                                                 auto gen = path_engine(mc.rng, static_cast<std::uint64_t>(p));
                                                 double v = 0.0, a = 0.0, e = 1.0;
                                                 for (int i = 0; i < n_steps; ++i) {
                                                     const double d = -0.5 * dt + sdt * normal(gen);
                                                     // int over the step of e^{2(v + d s/dt)} ds
                                                     const double chord =
                                                         std::abs(d) < 1e-12 ? 1.0 + d : std::expm1(2.0 * d) / (2.0 * d);
                                                     a += dt * e * chord;
                                                     v += d;
                                                     e = std::exp(2.0 * v);
                                                 }
                                                 const long ix = find_cell(x_edges, v);
                                                 const long iu = find_cell(u_edges, std::log(a * bridge));
                                                 if (ix >= 0 && iu >= 0) ++acc.c[ix * nu + iu];
                                             }
                                             return acc;
                                         });
    CellHistogram h{x_edges, u_edges, std::vector<double>(cells), mc.n_paths};
    for (std::size_t i = 0; i < cells; ++i) h.freq[i] = static_cast<double>(total.c[i]) / mc.n_paths;
    return h;
}

std::vector<double> my_cell_masses(double t, const std::vector<double>& x_edges, const std::vector<double>& u_edges,
                                   int order, const LogThetaFn& log_theta) {
    check_edges(x_edges, "x_edges");
    check_edges(u_edges, "u_edges");
    const GaussRule g = gauss_legendre(order);
    const std::size_t nx = x_edges.size() - 1, nu = u_edges.size() - 1;
    std::vector<double> out(nx * nu, 0.0);
    for (std::size_t ix = 0; ix < nx; ++ix) {
        const double hx = x_edges[ix + 1] - x_edges[ix];
        for (std::size_t iu = 0; iu < nu; ++iu) {
            const double hu = u_edges[iu + 1] - u_edges[iu];
            double acc = 0.0;
            for (int i = 0; i < order; ++i) {
                const double x = x_edges[ix] + 0.5 * hx * (g.nodes[i] + 1.0);
                for (int j = 0; j < order; ++j) {
                    const double u = u_edges[iu] + 0.5 * hu * (g.nodes[j] + 1.0);
                    acc += g.weights[i] * g.weights[j] * std::exp(u + my_log_density(x, std::exp(u), t, log_theta));
                }
            }
            out[ix * nu + iu] = 0.25 * hx * hu * acc;
        }
    }
    return out;
}

} // namespace svolkit
