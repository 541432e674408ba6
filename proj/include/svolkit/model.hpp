#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace svolkit {

enum class VolKind { constant, lognormal, bessel3 };

struct VolSpec {
    VolKind kind = VolKind::lognormal;
    double sigma = 0.3; // unused for bessel3
};

// dX = Y X dW, d<W,Z> = rho dt, Y driven by Z according to `vol`.
// For the constant kind Y == vol.sigma and y0 is ignored.
struct ModelSpec {
    double x0 = 1.0;
    double y0 = 0.2;
    double rho = 0.0;
    double horizon = 1.0;
    VolSpec vol;

    void validate() const; // throws std::invalid_argument
};

std::string to_string(VolKind kind);
VolKind vol_kind_from_string(const std::string& s);

struct RngSpec {
    std::uint64_t seed = 0;
    std::uint64_t stream_id = 0;
};

// Engine owned by one path: seeded from (seed, stream_id, path_index).
std::mt19937_64 path_engine(const RngSpec& rng, std::uint64_t path_index);

struct PathBundle {
    std::vector<double> times;
    std::vector<double> y;
    std::vector<double> z_increments; // size n
    std::vector<double> int_y_dz;     // running, size n+1
    std::vector<double> int_y2_du;    // running, size n+1
};

struct MixingMoments {
    double mu_z = 0.0;
    double sigma_z2 = 0.0;
};

// Terminal values of one simulated path; what the estimators consume.
struct PathFunctionals {
    double y_t = 0.0;
    double int_y_dz = 0.0;
    double int_y2_du = 0.0;
};

PathBundle simulate_vol_path(const ModelSpec& model, double t, int n_steps, const RngSpec& rng);

// Same scheme as simulate_vol_path without storing the path.
PathFunctionals simulate_functionals(const ModelSpec& model, double t, int n_steps, std::mt19937_64& gen);

MixingMoments mixing_moments(const PathBundle& path, double rho);
MixingMoments mixing_moments(const PathFunctionals& f, double rho);

struct McSettings {
    long n_paths = 200000;
    int n_steps = 0; // 0: 512 steps per unit time
    RngSpec rng;
    int threads = 0; // 0: SVOLKIT_THREADS, else hardware concurrency

    int steps_for(double t) const;
};

struct DensityEstimate {
    double density = 0.0;
    double stderr_ = 0.0;
};

// Mixing estimator: mean over volatility paths of phi((ln(r/x0) - mu_z)/sigma_z) / (r sigma_z).
std::vector<DensityEstimate> density_mc(const ModelSpec& model, double t, const std::vector<double>& r_grid,
                                        const McSettings& mc);

// Trapezoid integral of the mixing density over a log-uniform r-grid on
// [r_lo, r_hi], formed path by path so the stderr is that of the integral.
DensityEstimate density_mc_mass(const ModelSpec& model, double t, double r_lo, double r_hi, int n_points,
                                const McSettings& mc);

// X_t = x0 exp(mu_z + sigma_z g) with g ~ N(0,1) drawn on each path.
std::vector<double> asset_terminal_mc(const ModelSpec& model, double t, const McSettings& mc);

// Checks 0 < t <= horizon; throws InvalidHorizon.
void check_horizon(const ModelSpec& model, double t);

} // namespace svolkit
