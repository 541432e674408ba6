#include "svolkit/model.hpp"
#include "svolkit/errors.hpp"
#include "svolkit/numerics.hpp"
#include "svolkit/parallel.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace svolkit {

void ModelSpec::validate() const {
    if (!(x0 > 0.0) || !std::isfinite(x0)) throw std::invalid_argument("model: x0 must be positive");
    if (!(horizon > 0.0) || !std::isfinite(horizon)) throw std::invalid_argument("model: horizon must be positive");
    if (!(std::abs(rho) < 1.0)) throw std::invalid_argument("model: rho must lie in (-1, 1)");
    switch (vol.kind) {
    case VolKind::constant:
        if (!(vol.sigma > 0.0) || !std::isfinite(vol.sigma))
            throw std::invalid_argument("model: constant volatility needs sigma > 0");
        break;
    case VolKind::lognormal:
        if (!(vol.sigma > 0.0) || !std::isfinite(vol.sigma))
            throw std::invalid_argument("model: lognormal volatility needs sigma > 0");
        if (!(y0 > 0.0) || !std::isfinite(y0)) throw std::invalid_argument("model: y0 must be positive");
        break;
    case VolKind::bessel3:
        if (y0 != 1.0) throw std::invalid_argument("model: bessel3 volatility starts at y0 = 1");
        break;
    }
}

std::string to_string(VolKind kind) {
    switch (kind) {
    case VolKind::constant: return "constant";
    case VolKind::lognormal: return "lognormal";
    case VolKind::bessel3: return "bessel3";
    }
    return "unknown";
}

VolKind vol_kind_from_string(const std::string& s) {
    if (s == "constant") return VolKind::constant;
    if (s == "lognormal") return VolKind::lognormal;
    if (s == "bessel3") return VolKind::bessel3;
    throw std::invalid_argument("unknown volatility kind '" + s + "'");
}

void check_horizon(const ModelSpec& model, double t) {
    if (!(t > 0.0) || !std::isfinite(t)) throw InvalidHorizon("t must be positive");
    if (t > model.horizon * (1.0 + 1e-12)) throw InvalidHorizon("t exceeds the model horizon");
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Shared stepping scheme.  `visit(i, y_left, dz, y_right)` sees every step.
template <class Visit>
double run_path(const ModelSpec& model, double t, int n_steps, std::mt19937_64& gen, Visit&& visit) {
    std::normal_distribution<double> normal;
    const double dt = t / n_steps;
    const double sdt = std::sqrt(dt);
    switch (model.vol.kind) {
    case VolKind::constant: {
        const double s = model.vol.sigma;
        for (int i = 0; i < n_steps; ++i) visit(i, s, sdt * normal(gen), s);
        return s;
    }
    case VolKind::lognormal: {
        const double s = model.vol.sigma;
        const double drift = -0.5 * s * s * dt;
        double y = model.y0;
        for (int i = 0; i < n_steps; ++i) {
            const double dz = sdt * normal(gen);
            const double next = y * std::exp(s * dz + drift);
            if (!(next > 0.0)) throw NonPositiveVol("lognormal volatility underflowed to zero");
            visit(i, y, dz, next);
            y = next;
        }
        return y;
    }
    case VolKind::bessel3: {
        double w0 = 1.0, w1 = 0.0, w2 = 0.0;
        double y = 1.0;
        for (int i = 0; i < n_steps; ++i) {
            w0 += sdt * normal(gen);
            w1 += sdt * normal(gen);
            w2 += sdt * normal(gen);
            const double next = std::sqrt(w0 * w0 + w1 * w1 + w2 * w2);
            if (!(next > 0.0) || !std::isfinite(next)) throw NonPositiveVol("BES(3) path hit zero");
            // dZ recovered from dY = dZ + dt / Y with the drift frozen at the left node
            visit(i, y, (next - y) - dt / y, next);
            y = next;
        }
        return y;
    }
    }
    return 0.0;
}

} // namespace

std::mt19937_64 path_engine(const RngSpec& rng, std::uint64_t path_index) {
    const std::uint64_t key = splitmix64(splitmix64(splitmix64(rng.seed) ^ rng.stream_id) ^ path_index);
    return std::mt19937_64(key);
}

PathBundle simulate_vol_path(const ModelSpec& model, double t, int n_steps, const RngSpec& rng) {
    model.validate();
    check_horizon(model, t);
    if (n_steps < 1) throw std::invalid_argument("simulate_vol_path: n_steps must be >= 1");

    PathBundle p;
    p.times.resize(n_steps + 1);
    p.y.resize(n_steps + 1);
    p.z_increments.resize(n_steps);
    p.int_y_dz.assign(n_steps + 1, 0.0);
    p.int_y2_du.assign(n_steps + 1, 0.0);
    const double dt = t / n_steps;
    for (int i = 0; i <= n_steps; ++i) p.times[i] = i == n_steps ? t : i * dt;

    auto gen = path_engine(rng, 0);
    run_path(model, t, n_steps, gen, [&](int i, double yl, double dz, double yr) {
        p.y[i] = yl;
        p.y[i + 1] = yr;
        p.z_increments[i] = dz;
        p.int_y_dz[i + 1] = p.int_y_dz[i] + yl * dz;
        p.int_y2_du[i + 1] = p.int_y2_du[i] + 0.5 * (yl * yl + yr * yr) * dt;
    });
    return p;
}

PathFunctionals simulate_functionals(const ModelSpec& model, double t, int n_steps, std::mt19937_64& gen) {
    const double dt = t / n_steps;
    double iydz = 0.0, iy2 = 0.0;
    const double y_t = run_path(model, t, n_steps, gen, [&](int, double yl, double dz, double yr) {
        iydz += yl * dz;
        iy2 += 0.5 * (yl * yl + yr * yr) * dt;
    });
    return {y_t, iydz, iy2};
}

MixingMoments mixing_moments(const PathFunctionals& f, double rho) {
    return {rho * f.int_y_dz - 0.5 * f.int_y2_du, (1.0 - rho * rho) * f.int_y2_du};
}

MixingMoments mixing_moments(const PathBundle& path, double rho) {
    if (path.int_y_dz.empty() || path.int_y2_du.empty()) throw std::invalid_argument("mixing_moments: empty path");
    return mixing_moments(PathFunctionals{path.y.back(), path.int_y_dz.back(), path.int_y2_du.back()}, rho);
}

int McSettings::steps_for(double t) const {
    if (n_steps > 0) return n_steps;
    return std::max(1, static_cast<int>(std::ceil(512.0 * t - 1e-9)));
}

int resolve_threads(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("SVOLKIT_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

std::vector<DensityEstimate> density_mc(const ModelSpec& model, double t, const std::vector<double>& r_grid,
                                        const McSettings& mc) {
    model.validate();
    check_horizon(model, t);
    if (mc.n_paths < 2) throw std::invalid_argument("density_mc: need at least 2 paths");
    for (double r : r_grid)
        if (!(r > 0.0)) throw std::invalid_argument("density_mc: r values must be positive");

    const int n_steps = mc.steps_for(t);
    const std::size_t m = r_grid.size();
    std::vector<double> log_r(m);
    for (std::size_t j = 0; j < m; ++j) log_r[j] = std::log(r_grid[j] / model.x0);

    MomentSums total = parallel_blocks(mc.n_paths, mc.threads, MomentSums(m), [&](long, long begin, long end) {
        MomentSums acc(m);
        std::vector<double> values(m);
        for (long p = begin; p < end; ++p) {
            auto gen = path_engine(mc.rng, static_cast<std::uint64_t>(p));
            const MixingMoments mm = mixing_moments(simulate_functionals(model, t, n_steps, gen), model.rho);
            if (!(mm.sigma_z2 > 0.0)) throw NonPositiveVol("density_mc: path with zero integrated variance");
            const double sz = std::sqrt(mm.sigma_z2);
            for (std::size_t j = 0; j < m; ++j) values[j] = norm_pdf((log_r[j] - mm.mu_z) / sz) / (r_grid[j] * sz);
            acc.add(values);
        }
        return acc;
    });

    std::vector<DensityEstimate> out(m);
    for (std::size_t j = 0; j < m; ++j) out[j] = {total.mean(j), total.stderr_of(j)};
    return out;
}

DensityEstimate density_mc_mass(const ModelSpec& model, double t, double r_lo, double r_hi, int n_points,
                                const McSettings& mc) {
    model.validate();
    check_horizon(model, t);
    if (mc.n_paths < 2) throw std::invalid_argument("density_mc_mass: need at least 2 paths");
    if (!(r_lo > 0.0) || !(r_hi > r_lo) || n_points < 2)
        throw std::invalid_argument("density_mc_mass: need 0 < r_lo < r_hi and n_points >= 2");
    const int n_steps = mc.steps_for(t);
    const double v0 = std::log(r_lo / model.x0);
    const double h = (std::log(r_hi / model.x0) - v0) / (n_points - 1);

    MomentSums total = parallel_blocks(mc.n_paths, mc.threads, MomentSums(1), [&](long, long begin, long end) {
        MomentSums acc(1);
        double value[1];
        for (long p = begin; p < end; ++p) {
            auto gen = path_engine(mc.rng, static_cast<std::uint64_t>(p));
            const MixingMoments mm = mixing_moments(simulate_functionals(model, t, n_steps, gen), model.rho);
            if (!(mm.sigma_z2 > 0.0)) throw NonPositiveVol("density_mc_mass: path with zero integrated variance");
            const double sz = std::sqrt(mm.sigma_z2);
            // in v = ln(r/x0) the integrand g(r) r is the N(mu_z, sigma_z^2) density
            double s = 0.0;
            for (int i = 0; i < n_points; ++i)
                s += (i == 0 || i == n_points - 1 ? 0.5 : 1.0) * norm_pdf((v0 + i * h - mm.mu_z) / sz) / sz;
            value[0] = s * h;
            acc.add(value);
        }
        return acc;
    });
    return {total.mean(0), total.stderr_of(0)};
}

std::vector<double> asset_terminal_mc(const ModelSpec& model, double t, const McSettings& mc) {
    model.validate();
    check_horizon(model, t);
    if (mc.n_paths < 1) throw std::invalid_argument("asset_terminal_mc: need at least 1 path");
    const int n_steps = mc.steps_for(t);
    std::vector<double> out(static_cast<std::size_t>(mc.n_paths));

    struct Nothing {
        void merge(const Nothing&) {}
    };
    parallel_blocks(mc.n_paths, mc.threads, Nothing{}, [&](long, long begin, long end) {
        for (long p = begin; p < end; ++p) {
            auto gen = path_engine(mc.rng, static_cast<std::uint64_t>(p));
            const MixingMoments mm = mixing_moments(simulate_functionals(model, t, n_steps, gen), model.rho);
            std::normal_distribution<double> normal;
            out[static_cast<std::size_t>(p)] = model.x0 * std::exp(mm.mu_z + std::sqrt(mm.sigma_z2) * normal(gen));
        }
        return Nothing{};
    });
    return out;
}

} // namespace svolkit
