#pragma once

#include "svolkit/lognormal.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace svolkit {

struct CheckResult {
    std::string name;
    double target = 0.0;
    double measured = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

struct ValidationReport {
    std::vector<CheckResult> checks;
    bool overall = true; // conjunction of the pass flags

    void add(CheckResult c);
    void append(const ValidationReport& other);
};

struct ValidationOptions {
    long paths = 200000;               // mixing-estimator benchmarks
    long martingale_paths = 1000000;   // positive-correlation probe
    long histogram_paths = 10000000;   // (V_t, A_t) histogram
    int histogram_steps = 256;
    long kernel_paths = 200000;        // Brownian-kernel and BES(3) Laplace oracles
    std::uint64_t seed = 20240611;
    int threads = 0;
    // Replaces the scaled Hartman-Watson log wherever G is tabulated; a hook
    // for fault injection.
    LogThetaFn log_theta = log_theta_scaled;
};

// One group of checks per acceptance criterion, plus the G normalisation
// invariant.  Each returns its own report.
ValidationReport check_density_normalization(const ValidationOptions& o);
ValidationReport check_closed_form_vs_mc_density(const ValidationOptions& o);
ValidationReport check_black_scholes_degeneration(const ValidationOptions& o);
ValidationReport check_matsumoto_yor_law(const ValidationOptions& o);
ValidationReport check_brownian_kernels(const ValidationOptions& o);
ValidationReport check_bes3_laplace_transform(const ValidationOptions& o);
ValidationReport check_joint_density_inversion(const ValidationOptions& o);
ValidationReport check_option_pricing(const ValidationOptions& o);
ValidationReport check_martingale_regime(const ValidationOptions& o);
ValidationReport check_determinism(const ValidationOptions& o);
ValidationReport check_g_normalization(const ValidationOptions& o);

struct SuiteEntry {
    std::string name;
    std::function<ValidationReport(const ValidationOptions&)> run;
};

// The default suite in a fixed order.
const std::vector<SuiteEntry>& validation_suite();

// Runs the named groups (all of them when `only` is empty-optional; none for
// an empty list).  Throws std::invalid_argument on an unknown name.
ValidationReport run_validation(const ValidationOptions& o, const std::optional<std::vector<std::string>>& only = {});

} // namespace svolkit
