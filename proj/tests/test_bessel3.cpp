#include "svolkit/bessel3.hpp"
#include "svolkit/errors.hpp"
#include "svolkit/numerics.hpp"
#include "svolkit/oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

using namespace svolkit;

namespace {

double n_t(double z, double t) { return std::exp(-0.5 * z * z / t) / std::sqrt(2.0 * M_PI * t); }

// Cameron-Martin form of the Laplace transform in y of the joint density of
// (B_t, int B^2) from 0, with w = sqrt(2c).
double h_star_oracle(double t, double c, double z) {
    const double w = std::sqrt(2.0 * c);
    return std::sqrt(w / (2.0 * M_PI * std::sinh(w * t))) * std::exp(-0.5 * z * z * w / std::tanh(w * t));
}

ModelSpec bes3_model() {
    ModelSpec m;
    m.x0 = 1.0;
    m.y0 = 1.0;
    m.rho = -0.3;
    m.horizon = 0.5;
    m.vol.kind = VolKind::bessel3;
    return m;
}

} // namespace

TEST(EqA1, SmallBLimitIsGaussianTransform) {
    for (double c : {0.0, 0.7})
        for (double t : {0.5, 1.0})
            for (double x : {0.0, 1.0}) {
                const double ref = std::exp(-c * x * x / (1.0 + 2.0 * c * t)) / std::sqrt(1.0 + 2.0 * c * t);
                EXPECT_NEAR(eq_a1(1e-7, c, t, x), ref, 1e-12);
            }
}

TEST(EqA1, ZeroStartZeroC) {
    EXPECT_NEAR(eq_a1(1.0, 0.0, 1.0, 0.0), 1.0 / std::sqrt(std::cosh(1.0)), 1e-14);
    EXPECT_NEAR(eq_a1(1.0, 0.0, 1.0, 0.0), 0.805018, 1e-6);
}

TEST(EqA1, MonotoneInBAndC) {
    double prev = 1.0;
    for (double b : {0.1, 0.5, 1.0, 2.0, 4.0}) {
        const double v = eq_a1(b, 0.3, 1.0, 0.5);
        EXPECT_LT(v, prev);
        prev = v;
    }
    EXPECT_GT(eq_a1(1.0, 0.1, 1.0, 1.0), eq_a1(1.0, 0.9, 1.0, 1.0));
}

TEST(EqA1, LogFormAgreesAndStaysFinite) {
    EXPECT_NEAR(std::exp(log_eq_a1(0.5, 0.7, 1.0, 1.0)), eq_a1(0.5, 0.7, 1.0, 1.0), 1e-15);
    const double l = log_eq_a1(30.0, 0.0, 40.0, 3.0);
    EXPECT_TRUE(std::isfinite(l));
    EXPECT_LT(l, -500.0);
}

TEST(EqA2, ReducesToOneWithoutPenalty) {
    EXPECT_NEAR(eq_a2(1e-9, 1.0, 0.3, -0.4), 1.0, 1e-12);
}

TEST(EqA2, SymmetricInEndpoints) {
    for (double b : {0.5, 1.0})
        EXPECT_NEAR(eq_a2(b, 0.7, 0.2, 1.3), eq_a2(b, 0.7, 1.3, 0.2), 1e-15);
}

TEST(EqA2, BridgeIdentityRecoversEqA1) {
    QuadratureSpec q;
    q.abs_tol = 1e-13;
    q.rel_tol = 1e-12;
    for (double b : {0.5, 1.0})
        for (double c : {0.0, 0.7})
            for (double x : {0.0, 1.0}) {
                const double t = 0.8;
                const double lhs = integrate_1d([&](double y) { return n_t(y - x, t) * std::exp(-c * y * y) *
                                                                         eq_a2(b, t, x, y); },
                                                -30.0, 30.0, q)
                                       .value;
                EXPECT_NEAR(lhs, eq_a1(b, c, t, x), 1e-9);
            }
}

TEST(EqA2, AgreesWithBridgeOracle) {
    McSettings mc;
    mc.n_paths = 50000;
    mc.rng = {7, 0};
    const McEstimate m = mc_eq_a2_bridge(1.0, 1.0, 0.0, 1.0, mc);
    EXPECT_NEAR(m.mean, eq_a2(1.0, 1.0, 0.0, 1.0), 3.0 * m.stderr_);
}

TEST(HStar, MatchesCameronMartinForm) {
    for (double t : {0.5, 1.0, 2.0})
        for (double c : {0.1, 0.5, 2.0, 8.0})
            for (double z : {0.0, 0.7, 2.0})
                EXPECT_NEAR(h_star(t, c, z) / h_star_oracle(t, c, z), 1.0, 1e-12) << t << " " << c << " " << z;
}

TEST(HStar, ZeroArgumentIsGaussianMarginal) {
    for (double z : {0.0, 1.0, -2.0}) EXPECT_NEAR(h_star(1.0, 0.0, z), n_t(z, 1.0), 1e-14);
    EXPECT_NEAR(h_star(1.0, 1e-14, 1.0), n_t(1.0, 1.0), 1e-12);
}

TEST(HStar, ComplexEvaluationOnRealAxis) {
    const auto v = h_star(1.0, std::complex<long double>(0.5L, 0.0L), 0.5);
    EXPECT_NEAR(static_cast<double>(v.real()), h_star(1.0, 0.5, 0.5), 1e-14);
    EXPECT_NEAR(static_cast<double>(v.imag()), 0.0, 1e-16);
}

TEST(JointDensity, RoundTripAndPositivity) {
    QuadratureSpec q;
    q.rel_tol = 1e-9;
    q.abs_tol = 1e-12;
    const double lt = integrate_1d([](double y) { return std::exp(-y) * joint_bm_density(0.5, y, 1.0); }, 0.0,
                                   INFINITY, q)
                          .value;
    EXPECT_NEAR(lt, h_star(1.0, 1.0, 0.5), 1e-6);
    for (double z : {0.0, 1.0, 2.5})
        for (double y : {0.05, 0.2, 0.5, 1.0, 3.0}) EXPECT_GE(joint_bm_density(z, y, 1.0), -1e-12);
}

TEST(Bes3Laplace, EqualParametersGiveOne) {
    for (double b : {0.25, 0.5, 1.0})
        for (double t : {0.5, 1.0}) EXPECT_NEAR(bes3_laplace({b, b, t}), 1.0, 1e-8);
}

TEST(Bes3Laplace, VanishingParametersGiveOne) { EXPECT_NEAR(bes3_laplace({1e-8, 1e-8, 1.0}), 1.0, 1e-7); }

TEST(Bes3Laplace, DecreasingInB) {
    double prev = INFINITY;
    for (double b : {0.25, 0.5, 1.0, 2.0}) {
        const double v = bes3_laplace({0.5, b, 1.0});
        EXPECT_LT(v, prev);
        prev = v;
    }
}

TEST(Bes3Laplace, AgreesWithDirectMc) {
    McSettings mc;
    mc.n_paths = 50000;
    mc.rng = {11, 0};
    const Bes3LaplacePoint pt{0.25, 1.0, 1.0};
    const McEstimate m = mc_bes3_laplace(pt, mc);
    EXPECT_NEAR(m.mean, bes3_laplace(pt), 3.0 * m.stderr_);
}

TEST(Bes3Laplace, RejectsBadPoints) {
    EXPECT_THROW(bes3_laplace({-0.1, 0.5, 1.0}), std::invalid_argument);
    EXPECT_THROW(bes3_laplace({0.5, -0.5, 1.0}), std::invalid_argument);
    EXPECT_THROW(bes3_laplace({0.5, 0.5, 0.0}), std::invalid_argument);
}

TEST(BrownianKL, MomentsOfFunctionals) {
    const double t = 0.8;
    const BrownianKL kl(t, 48);
    std::mt19937_64 gen(3);
    std::normal_distribution<double> normal;
    std::vector<double> eta(48);
    const int n = 200000;
    double s_int = 0.0, s_int2 = 0.0, s_sq = 0.0;
    for (int i = 0; i < n; ++i) {
        for (double& e : eta) e = normal(gen);
        const double w = std::sqrt(t) * normal(gen);
        const double a = normal(gen), b = normal(gen);
        const BmFunctionals f = kl.functionals(0.0, w, eta.data(), a, b);
        s_int += f.integral;
        s_int2 += f.integral * f.integral;
        s_sq += f.integral_sq;
    }
    // E int B = 0, Var int B = t^3/3, E int B^2 = t^2/2
    EXPECT_NEAR(s_int / n, 0.0, 4.0 * std::sqrt(t * t * t / 3.0 / n));
    EXPECT_NEAR(s_int2 / n / (t * t * t / 3.0), 1.0, 0.02);
    EXPECT_NEAR(s_sq / n / (0.5 * t * t), 1.0, 0.02);
}

TEST(BrownianKL, EndpointAndShift) {
    const BrownianKL kl(1.0, 8);
    std::vector<double> eta(8, 0.0);
    const BmFunctionals f = kl.functionals(2.0, 0.0, eta.data(), 0.0, 0.0);
    EXPECT_DOUBLE_EQ(f.end, 2.0);
    EXPECT_NEAR(f.integral, 2.0, 1e-15);
    // the remainder's square integral enters through its mean,
    // t^2/6 minus the first eight eigenvalues t^2/(k pi)^2
    double tail = 1.0 / 6.0;
    for (int k = 1; k <= 8; ++k) tail -= 1.0 / (k * k * M_PI * M_PI);
    EXPECT_NEAR(f.integral_sq, 4.0 + tail, 1e-12);
}

TEST(Bes3Density, AgreesWithMixingMc) {
    const ModelSpec m = bes3_model();
    const std::vector<double> r = {0.7, 1.0, 1.4};
    const auto q = bes3_asset_density(m, 0.5, r);
    McSettings mc;
    mc.n_paths = 100000;
    mc.rng = {20240611, 5};
    const auto e = density_mc(m, 0.5, r, mc);
    for (std::size_t i = 0; i < r.size(); ++i)
        EXPECT_NEAR(q[i].density, e[i].density, 3.0 * std::hypot(q[i].stderr_, e[i].stderr_)) << r[i];
}

TEST(Bes3Density, NormalizedAndMeanPreserving) {
    const ModelSpec m = bes3_model();
    const DensityEstimate mass = bes3_density_mass(m, 0.5, 1e-4, 1e4, 1501);
    EXPECT_NEAR(mass.density, 1.0, 2e-3);

    // first moment from the density on a log grid: X is a martingale for rho <= 0
    std::vector<double> r(801);
    const double a = std::log(1e-3), h = (std::log(1e2) - a) / 800;
    for (int i = 0; i <= 800; ++i) r[i] = std::exp(a + i * h);
    const auto g = bes3_asset_density(m, 0.5, r);
    double mean = 0.0;
    for (int i = 0; i <= 800; ++i) mean += (i == 0 || i == 800 ? 0.5 : 1.0) * r[i] * r[i] * g[i].density;
    EXPECT_NEAR(mean * h, 1.0, 2e-3);
}

TEST(Bes3Density, ZeroCorrelationIsPositive) {
    ModelSpec m = bes3_model();
    m.rho = 0.0;
    for (const auto& d : bes3_asset_density(m, 0.5, {0.2, 0.6, 1.0, 2.0, 5.0})) EXPECT_GT(d.density, 0.0);
}

TEST(Bes3Density, IndependentOfThreadCount) {
    const ModelSpec m = bes3_model();
    Bes3QmcSettings one, four;
    one.threads = 1;
    four.threads = 4;
    one.n_shifts = four.n_shifts = 4;
    const auto a = bes3_asset_density(m, 0.5, {0.8, 1.1}, one);
    const auto b = bes3_asset_density(m, 0.5, {0.8, 1.1}, four);
    for (int i = 0; i < 2; ++i) {
        EXPECT_EQ(a[i].density, b[i].density);
        EXPECT_EQ(a[i].stderr_, b[i].stderr_);
    }
}

TEST(Bes3Density, RejectsWrongModel) {
    ModelSpec m = bes3_model();
    m.vol.kind = VolKind::lognormal;
    EXPECT_THROW(bes3_asset_density(m, 0.5, {1.0}), std::invalid_argument);
}
