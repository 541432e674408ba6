#include "svolkit/errors.hpp"
#include "svolkit/numerics.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

using namespace svolkit;

#ifndef GS_TERMS
#define GS_TERMS 18
#endif

namespace {

// integrand of the Hartman-Watson integral at t = 1, r = 1
double hw_integrand(double x) {
    if (x > 40.0) return 0.0; // below 1e-300, and cosh would overflow further out
    return std::exp(-0.5 * x * x - std::cosh(x)) * std::sinh(x) * std::sin(M_PI * x);
}

long double simpson(double (*f)(double), long double a, long double b, int n) {
    const long double h = (b - a) / n;
    long double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0L : 2.0L) * f(static_cast<double>(a + i * h));
    return s * h / 3.0L;
}

} // namespace

TEST(Quadrature, ExponentialTail) {
    QuadResult r = integrate_1d([](double x) { return std::exp(-x); }, 0.0, INFINITY);
    EXPECT_NEAR(r.value, 1.0, 1e-10);
}

TEST(Quadrature, Constant) {
    EXPECT_NEAR(integrate_1d([](double) { return 1.0; }, 0.0, 1.0).value, 1.0, 1e-15);
}

TEST(Quadrature, HartmanWatsonIntegrandMatchesSimpson) {
    // Beyond x = 12 the integrand is below 1e-60.
    const long double ref = simpson(hw_integrand, 0.0L, 12.0L, 5000);
    QuadratureSpec spec;
    spec.abs_tol = 1e-14;
    spec.rel_tol = 1e-13;
    QuadResult r = integrate_1d(hw_integrand, 0.0, INFINITY, spec);
    EXPECT_NEAR(r.value, static_cast<double>(ref), 1e-12);
}

TEST(Quadrature, DoublyInfiniteGaussian) {
    QuadResult r = integrate_1d([](double x) { return norm_pdf(x - 0.3); }, -INFINITY, INFINITY);
    EXPECT_NEAR(r.value, 1.0, 1e-10);
}

TEST(Quadrature, FixedUpperBoundTruncates) {
    QuadratureSpec spec;
    spec.truncation = FixedUpperBound{2.0};
    QuadResult r = integrate_1d([](double x) { return std::exp(-x); }, 0.0, INFINITY, spec);
    EXPECT_NEAR(r.value, 1.0 - std::exp(-2.0), 1e-12);
}

TEST(Quadrature, NonFiniteIntegrandThrows) {
    EXPECT_THROW(integrate_1d([](double) { return NAN; }, 0.0, 1.0), NonFiniteIntegrand);
}

TEST(Quadrature, SubdivisionLimit) {
    QuadratureSpec spec;
    spec.max_subdivisions = 3;
    spec.abs_tol = 1e-15;
    spec.rel_tol = 1e-15;
    EXPECT_THROW(integrate_1d([](double x) { return std::sin(200.0 * x) * std::exp(x); }, 0.0, 10.0, spec),
                 NonConvergence);
}

TEST(Quadrature, InvalidSpec) {
    QuadratureSpec spec;
    spec.abs_tol = 0.0;
    EXPECT_THROW(spec.validate(), std::invalid_argument);
}

TEST(Quadrature, LinearOnRandomPolynomials) {
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> U(-2.0, 2.0);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> p(6), q(6);
        for (auto& c : p) c = U(gen);
        for (auto& c : q) c = U(gen);
        const double a = U(gen), b = U(gen);
        auto poly = [](const std::vector<double>& c, double x) {
            double s = 0.0;
            for (auto it = c.rbegin(); it != c.rend(); ++it) s = s * x + *it;
            return s;
        };
        const double lo = -1.0, hi = 1.5;
        QuadResult ip = integrate_1d([&](double x) { return poly(p, x); }, lo, hi);
        QuadResult iq = integrate_1d([&](double x) { return poly(q, x); }, lo, hi);
        QuadResult iab = integrate_1d([&](double x) { return a * poly(p, x) + b * poly(q, x); }, lo, hi);
        const double tol = std::abs(a) * ip.err_est + std::abs(b) * iq.err_est + iab.err_est + 1e-12;
        EXPECT_NEAR(iab.value, a * ip.value + b * iq.value, tol);
    }
}

TEST(Oscillatory, DampedSine) {
    QuadResult r = oscillatory_integrate([](double x) { return std::exp(-x) * std::sin(x); }, 1.0, 0.0);
    EXPECT_NEAR(r.value, 0.5, 1e-10);
}

TEST(Oscillatory, SlowlyDecayingAlternatingSeries) {
    // sin(x)/x on [0, inf) = pi/2; terms decay only like 1/k.
    QuadResult r = oscillatory_integrate([](double x) { return x == 0.0 ? 1.0 : std::sin(x) / x; }, 1.0, 0.0);
    EXPECT_NEAR(r.value, M_PI / 2, 1e-8);
}

TEST(Oscillatory, AgreesWithAdaptiveOnHartmanWatsonIntegrand) {
    QuadratureSpec spec;
    spec.abs_tol = 1e-13;
    spec.rel_tol = 1e-12;
    QuadResult a = oscillatory_integrate(hw_integrand, M_PI, 0.0, spec);
    QuadResult b = integrate_1d(hw_integrand, 0.0, INFINITY, spec);
    EXPECT_NEAR(a.value, b.value, 1e-9);
    EXPECT_NEAR(a.value, b.value, 10.0 * std::max(a.err_est, b.err_est) + 1e-15);
}

TEST(Oscillatory, ZeroIntegrand) {
    QuadResult r = oscillatory_integrate([](double) { return 0.0; }, 2.0, 0.0);
    EXPECT_EQ(r.value, 0.0);
}

TEST(Oscillatory, NonZeroLowerLimit) {
    // int_1^inf e^{-x} sin(x) dx = e^{-1} (sin 1 + cos 1) / 2
    QuadResult r = oscillatory_integrate([](double x) { return std::exp(-x) * std::sin(x); }, 1.0, 1.0);
    EXPECT_NEAR(r.value, std::exp(-1.0) * (std::sin(1.0) + std::cos(1.0)) / 2, 1e-10);
}

TEST(Laplace, ExponentialPair) {
    auto F = [](cplx c) { return 1.0L / (c + 1.0L); };
    EXPECT_NEAR(invert_laplace(F, 1.0), std::exp(-1.0), 1e-6);
    LaplaceInversionSpec gs{LaplaceMethod::gaver_stehfest, 16, 0.0};
    EXPECT_NEAR(invert_laplace(F, 1.0, gs), std::exp(-1.0), 1e-6);
}

TEST(Laplace, RampPair) {
    auto F = [](cplx c) { return 1.0L / (c * c); };
    EXPECT_NEAR(invert_laplace(F, 2.0), 2.0, 1e-6);
}

TEST(Laplace, ShiftedDomain) {
    // f(y) = e^{2y}: transform 1/(c-2) has its pole right of the origin.
    auto F = [](cplx c) { return 1.0L / (c - 2.0L); };
    LaplaceInversionSpec spec;
    spec.scale_shift = 3.0;
    EXPECT_NEAR(invert_laplace(F, 1.5, spec), std::exp(3.0), 1e-8 * std::exp(3.0));
}

TEST(Laplace, RecoversStandardPairsOnGrid) {
    auto E = [](cplx c) { return 1.0L / (c + 1.0L); };
    auto YE = [](cplx c) { return 1.0L / ((c + 1.0L) * (c + 1.0L)); };
    LaplaceInversionSpec gs{LaplaceMethod::gaver_stehfest, GS_TERMS, 0.0};
    for (double y = 0.1; y <= 5.0 + 1e-12; y += 0.1) {
        EXPECT_NEAR(invert_laplace(E, y), std::exp(-y), 1e-5);
        EXPECT_NEAR(invert_laplace(YE, y), y * std::exp(-y), 1e-5);
        EXPECT_NEAR(invert_laplace(E, y, gs), std::exp(-y), 1e-5);
        EXPECT_NEAR(invert_laplace(YE, y, gs), y * std::exp(-y), 1e-5);
    }
}

TEST(Laplace, HalfNormalWithEulerMethod) {
    // The transform e^{c^2/2} erfc(c/sqrt2) grows in the left half-plane, so
    // contour methods do not apply; it is evaluated here by direct quadrature.
    auto f = [](double y) { return std::sqrt(2.0 / M_PI) * std::exp(-0.5 * y * y); };
    QuadratureSpec qs;
    qs.abs_tol = 1e-14;
    qs.rel_tol = 1e-13;
    qs.max_subdivisions = 4000;
    auto F = [&](cplx c) {
        const double a = static_cast<double>(c.real()), b = static_cast<double>(c.imag());
        const double hi = std::min(40.0, 60.0 / a); // the integrand is negligible beyond
        const double re = integrate_1d([&](double y) { return f(y) * std::exp(-a * y) * std::cos(b * y); }, 0.0, hi, qs).value;
        const double im = integrate_1d([&](double y) { return -f(y) * std::exp(-a * y) * std::sin(b * y); }, 0.0, hi, qs).value;
        return cplx(re, im);
    };
    LaplaceInversionSpec spec{LaplaceMethod::euler, 24, 0.0};
    for (double y = 0.1; y <= 5.0 + 1e-12; y += 0.1) EXPECT_NEAR(invert_laplace(F, y, spec), f(y), 1e-5) << y;
}

TEST(Laplace, EulerMethodOnStandardPairs) {
    auto E = [](cplx c) { return 1.0L / (c + 1.0L); };
    LaplaceInversionSpec spec{LaplaceMethod::euler, 24, 0.0};
    for (double y : {0.1, 1.0, 3.0, 5.0}) EXPECT_NEAR(invert_laplace(E, y, spec), std::exp(-y), 1e-8);
}

TEST(Laplace, GaverStehfestCancellationGuard) {
    auto F = [](cplx c) { return 1.0L / (c + 1.0L); };
    LaplaceInversionSpec gs{LaplaceMethod::gaver_stehfest, 16, 0.0};
    // e^{-y} at y = 60 is far below the weights' dynamic range.
    EXPECT_THROW(invert_laplace(F, 60.0, gs), UnstableInversion);
}

TEST(Laplace, SpecValidation) {
    EXPECT_THROW((LaplaceInversionSpec{LaplaceMethod::gaver_stehfest, 7, 0.0}.validate()), std::invalid_argument);
    EXPECT_THROW((LaplaceInversionSpec{LaplaceMethod::talbot, 6, 0.0}.validate()), std::invalid_argument);
}

TEST(Normal, Basics) {
    EXPECT_EQ(norm_cdf(0.0), 0.5);
    EXPECT_NEAR(norm_pdf(0.0), 0.3989422804014327, 1e-16);
}

TEST(Normal, CdfAgainstSeries) {
    // Phi(x) = 1/2 + phi(x) * sum_n x^{2n+1} / (1*3*...*(2n+1))
    const double x = 1.959963985;
    long double term = x, sum = x;
    for (int n = 1; n < 200; ++n) {
        term *= static_cast<long double>(x) * x / (2 * n + 1);
        sum += term;
    }
    const long double series = 0.5L + sum * std::exp(-0.5L * x * x) / std::sqrt(2.0L * M_PIl);
    EXPECT_NEAR(norm_cdf(x), 0.975, 1e-9);
    EXPECT_NEAR(norm_cdf(x), static_cast<double>(series), 1e-15);
}

TEST(Normal, Symmetry) {
    for (double x = -8.0; x <= 8.0; x += 0.01) EXPECT_NEAR(norm_cdf(-x), 1.0 - norm_cdf(x), 1e-15);
}

TEST(Normal, MonotoneOnFineGrid) {
    double prev = 0.0;
    const int n = 1000000;
    for (int i = 0; i <= n; ++i) {
        const double v = norm_cdf(-10.0 + 20.0 * i / n);
        ASSERT_GE(v, prev);
        prev = v;
    }
}

TEST(Normal, QuantileRoundTrip) {
    for (double p : {1e-12, 1e-6, 0.01, 0.2, 0.5, 0.8, 0.975, 0.999999}) {
        EXPECT_NEAR(norm_cdf(norm_quantile(p)), p, 1e-14 * std::max(p, 1e-3)) << p;
    }
    EXPECT_NEAR(norm_quantile(0.975), 1.959963984540054, 1e-14);
}

TEST(Normal, LogHyperbolic) {
    EXPECT_NEAR(log_cosh(800.0), 800.0 - M_LN2, 1e-12);
    EXPECT_NEAR(log_sinh(800.0), 800.0 - M_LN2, 1e-12);
    EXPECT_NEAR(log_cosh(1.0), std::log(std::cosh(1.0)), 1e-15);
    EXPECT_NEAR(log_cosh(1e-5), 0.5e-10 - 1e-20 / 12, 1e-25);
}
