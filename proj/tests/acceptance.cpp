// Acceptance suite: one pass/fail line per criterion, its individual checks
// indented beneath it.  Exit status 1 when any criterion fails.

#include "svolkit/validation.hpp"

#include <chrono>
#include <cstdio>
#include <exception>

using namespace svolkit;

namespace {

struct Criterion {
    int id;
    const char* title;
    ValidationReport (*run)(const ValidationOptions&);
    double max_seconds;
};

} // namespace

int main() {
    const ValidationOptions o;
    // density normalization runs three models at 60 s each
    const Criterion criteria[] = {
        {1, "density normalization", check_density_normalization, 180.0},
        {2, "closed-form vs MC density", check_closed_form_vs_mc_density, 120.0},
        {3, "Black-Scholes degeneration", check_black_scholes_degeneration, 5.0},
        {4, "Matsumoto-Yor law histogram", check_matsumoto_yor_law, 600.0},
        {5, "Brownian kernels", check_brownian_kernels, 300.0},
        {6, "BES(3) Laplace transform", check_bes3_laplace_transform, 300.0},
        {7, "joint-density inversion", check_joint_density_inversion, 120.0},
        {8, "option pricing", check_option_pricing, 300.0},
        {9, "martingale regime", check_martingale_regime, 600.0},
        {10, "determinism", check_determinism, 600.0},
    };

    int failed = 0;
    for (const Criterion& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        ValidationReport rep;
        std::string error;
        try {
            rep = c.run(o);
        } catch (const std::exception& e) {
            error = e.what();
            rep.overall = false;
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_time = secs < c.max_seconds;
        const bool pass = rep.overall && in_time && error.empty();
        int n_pass = 0;
        for (const CheckResult& r : rep.checks) n_pass += r.pass;
        std::printf("criterion %2d %-30s %s  (%d/%zu checks, %.1f s, limit %.0f s)\n", c.id, c.title,
                    pass ? "PASS" : "FAIL", n_pass, rep.checks.size(), secs, c.max_seconds);
        if (!error.empty()) std::printf("    error: %s\n", error.c_str());
        if (!in_time) std::printf("    over the time limit\n");
        for (const CheckResult& r : rep.checks)
            std::printf("    %s %s: target %.10g measured %.10g tolerance %.3g\n", r.pass ? "ok  " : "FAIL",
                        r.name.c_str(), r.target, r.measured, r.tolerance);
        std::fflush(stdout);
        failed += !pass;
    }
    std::printf("%d of 10 criteria passed\n", 10 - failed);
    return failed == 0 ? 0 : 1;
}
