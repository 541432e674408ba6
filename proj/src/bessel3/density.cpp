#include "svolkit/bessel3.hpp"
#include "svolkit/parallel.hpp"

#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <random>
#include <stdexcept>
#include <thread>
#include <vector>

namespace svolkit {

BrownianKL::BrownianKL(double t, int n_terms) : t_(t), n_(n_terms) {
    if (!(t > 0.0) || !std::isfinite(t)) throw std::invalid_argument("BrownianKL: t must be positive");
    if (n_terms < 1) throw std::invalid_argument("BrownianKL: n_terms must be >= 1");
    lin_.resize(n_);
    ulin_.resize(n_);
    var_.resize(n_);
    double c00 = t * t * t / 12.0, c11 = std::pow(t, 5) / 45.0, c01 = std::pow(t, 4) / 24.0;
    sq_tail_ = t * t / 6.0;
    for (int k = 1; k <= n_; ++k) {
        const double kp = k * M_PI;
        const double mu = t * t / (kp * kp);
        const double amp = std::sqrt(mu) * std::sqrt(2.0 / t);
        var_[k - 1] = mu;
        lin_[k - 1] = amp * (k % 2 ? 2.0 : 0.0) * t / kp;
        ulin_[k - 1] = amp * (k % 2 ? 1.0 : -1.0) * t * t / kp;
        c00 -= lin_[k - 1] * lin_[k - 1];
        c11 -= ulin_[k - 1] * ulin_[k - 1];
        c01 -= lin_[k - 1] * ulin_[k - 1];
        sq_tail_ -= mu;
    }
    l00_ = std::sqrt(std::max(0.0, c00));
    l10_ = l00_ > 0.0 ? c01 / l00_ : 0.0;
    l11_ = std::sqrt(std::max(0.0, c11 - l10_ * l10_));
    sq_tail_ = std::max(0.0, sq_tail_);
}

BmFunctionals BrownianKL::functionals(double x, double w_t, const double* eta, double tail0, double tail1) const {
    double i_bb = l00_ * tail0;
    double i_ubb = l10_ * tail0 + l11_ * tail1;
    double i_bb2 = sq_tail_;
    for (int k = 0; k < n_; ++k) {
        i_bb += lin_[k] * eta[k];
        i_ubb += ulin_[k] * eta[k];
        i_bb2 += var_[k] * eta[k] * eta[k];
    }
    // W = B - x = (u/t) w_t + bridge
    const double i_w = 0.5 * w_t * t_ + i_bb;
    const double i_w2 = w_t * w_t * t_ / 3.0 + 2.0 * (w_t / t_) * i_ubb + i_bb2;
    return {x + w_t, x * t_ + i_w, x * x * t_ + 2.0 * x * i_w + i_w2};
}

namespace {

void check_bes3(const ModelSpec& model, double t) {
    model.validate();
    if (model.vol.kind != VolKind::bessel3) throw std::invalid_argument("bes3_asset_density: model must be bessel3");
    check_horizon(model, t);
}

// Per-shift lattice averages of the density at every r.
std::vector<std::vector<double>> per_shift_density(const ModelSpec& model, double t, const std::vector<double>& r_grid,
                                                   const Bes3QmcSettings& qmc) {
    if (qmc.n_shifts < 2) throw std::invalid_argument("bes3_asset_density: need at least 2 random shifts");
    if (qmc.kl_terms < 1) throw std::invalid_argument("bes3_asset_density: kl_terms must be >= 1");
    for (double r : r_grid)
        if (!(r > 0.0) || !std::isfinite(r)) throw std::invalid_argument("bes3_asset_density: r must be positive");

    const BrownianKL kl(t, qmc.kl_terms);
    const int n = kBes3LatticeSize;
    const int terms = qmc.kl_terms;
    const int dim = 3 + 3 * terms + 6;
    std::vector<std::int64_t> gen(dim);
    gen[0] = 1;
    for (int j = 1; j < dim; ++j) gen[j] = gen[j - 1] * kBes3LatticeGenerator % n;

    const std::size_t m = r_grid.size();
    std::vector<double> log_r(m);
    for (std::size_t i = 0; i < m; ++i) log_r[i] = std::log(r_grid[i] / model.x0);
    const double rho = model.rho;
    const double sq_t = std::sqrt(t);

    std::vector<std::vector<double>> out(qmc.n_shifts, std::vector<double>(m, 0.0));
    auto run_shift = [&](int s) {
        auto eng = path_engine(qmc.rng, static_cast<std::uint64_t>(s));
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        std::vector<double> shift(dim);
        for (double& v : shift) v = unif(eng);

        std::vector<double> z(dim);
        std::vector<double> eta(3 * static_cast<std::size_t>(terms));
        auto& acc = out[s];
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < dim; ++j) {
                double u = static_cast<double>(i * gen[j] % n) / n + shift[j];
                if (u >= 1.0) u -= 1.0;
                if (u <= 0.0) u = 0.5 / n;
                z[j] = norm_quantile(u);
            }
            // coordinates: 3 endpoints, then coefficient k of each path, then 2 tails per path
            double x_star = 0.0, y_star = 0.0;
            for (int p = 0; p < 3; ++p) {
                for (int k = 0; k < terms; ++k) eta[p * terms + k] = z[3 + 3 * k + p];
                const int tail = 3 + 3 * terms + 2 * p;
                const BmFunctionals f =
                    kl.functionals(p == 0 ? 1.0 : 0.0, sq_t * z[p], &eta[p * terms], z[tail], z[tail + 1]);
                x_star += f.end * f.end;
                y_star += f.integral_sq;
            }
            const double mu = 0.5 * rho * (x_star - 1.0 - 3.0 * t) - 0.5 * y_star;
            const double sd = std::sqrt((1.0 - rho * rho) * y_star);
            for (std::size_t k = 0; k < m; ++k) acc[k] += norm_pdf((log_r[k] - mu) / sd) / sd;
        }
        for (std::size_t k = 0; k < m; ++k) acc[k] /= n * r_grid[k];
    };

    const int workers = std::max(1, std::min(resolve_threads(qmc.threads), qmc.n_shifts));
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto run = [&](int w) {
        try {
            for (int s = w; s < qmc.n_shifts; s += workers) run_shift(s);
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
    return out;
}

DensityEstimate across_shifts(const std::vector<double>& v) {
    MomentSums ms(1);
    for (double x : v) ms.add(std::vector<double>{x});
    return {ms.mean(0), ms.stderr_of(0)};
}

} // namespace

std::vector<DensityEstimate> bes3_asset_density(const ModelSpec& model, double t, const std::vector<double>& r_grid,
                                                const Bes3QmcSettings& qmc) {
    check_bes3(model, t);
    const auto shifts = per_shift_density(model, t, r_grid, qmc);
    std::vector<DensityEstimate> out(r_grid.size());
    for (std::size_t k = 0; k < r_grid.size(); ++k) {
        std::vector<double> v;
        for (const auto& s : shifts) v.push_back(s[k]);
        out[k] = across_shifts(v);
    }
    return out;
}

DensityEstimate bes3_density_mass(const ModelSpec& model, double t, double r_lo, double r_hi, int n_points,
                                  const Bes3QmcSettings& qmc) {
    check_bes3(model, t);
    if (!(r_lo > 0.0) || !(r_hi > r_lo) || n_points < 2)
        throw std::invalid_argument("bes3_density_mass: need 0 < r_lo < r_hi and n_points >= 2");
    // trapezoid in v = ln r: int g(r) dr = int g(e^v) e^v dv
    std::vector<double> r(n_points);
    const double v0 = std::log(r_lo);
    const double h = (std::log(r_hi) - v0) / (n_points - 1);
    for (int i = 0; i < n_points; ++i) r[i] = std::exp(v0 + i * h);
    const auto shifts = per_shift_density(model, t, r, qmc);
    std::vector<double> mass;
    for (const auto& s : shifts) {
        double acc = 0.0;
        for (int i = 0; i < n_points; ++i) acc += (i == 0 || i == n_points - 1 ? 0.5 : 1.0) * s[i] * r[i];
        mass.push_back(acc * h);
    }
    return across_shifts(mass);
}

} // namespace svolkit
