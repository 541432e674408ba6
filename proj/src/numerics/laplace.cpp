#include "svolkit/errors.hpp"
#include "svolkit/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace svolkit {

void LaplaceInversionSpec::validate() const {
    if (method == LaplaceMethod::gaver_stehfest) {
        if (n_terms < 4 || n_terms % 2 != 0)
            throw std::invalid_argument("LaplaceInversionSpec: Gaver-Stehfest needs an even n_terms >= 4");
    } else if (method == LaplaceMethod::talbot && n_terms < 8) {
        throw std::invalid_argument("LaplaceInversionSpec: Talbot needs n_terms >= 8");
    } else if (method == LaplaceMethod::euler && (n_terms < 4 || n_terms > 40)) {
        throw std::invalid_argument("LaplaceInversionSpec: Euler needs 4 <= n_terms <= 40");
    }
    if (!std::isfinite(scale_shift)) throw std::invalid_argument("LaplaceInversionSpec: scale_shift must be finite");
}

namespace {

using ld = long double;

// Fixed Talbot contour (Abate & Valko): s(theta) = r*theta*(cot theta + i).
ld talbot(const LaplaceTransform& F, ld y, int M) {
    const ld r = 2.0L * M / (5.0L * y);
    const ld pi = 3.141592653589793238462643383279502884L;
    ld acc = 0.5L * std::real(F(cplx(r, 0.0L))) * std::exp(r * y);
    for (int k = 1; k < M; ++k) {
        const ld th = k * pi / M;
        const ld cot = std::cos(th) / std::sin(th);
        const cplx s(r * th * cot, r * th);
        const ld sigma = th + (th * cot - 1.0L) * cot;
        const cplx term = std::exp(s * y) * F(s) * cplx(1.0L, sigma);
        acc += std::real(term);
    }
    return acc * r / M;
}

ld factorial(int n) {
    ld f = 1.0L;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

std::vector<ld> stehfest_weights(int N) {
    const int h = N / 2;
    std::vector<ld> v(N + 1, 0.0L);
    for (int k = 1; k <= N; ++k) {
        ld s = 0.0L;
        for (int j = (k + 1) / 2; j <= std::min(k, h); ++j) {
            s += std::pow(static_cast<ld>(j), h) * factorial(2 * j) /
                 (factorial(h - j) * factorial(j) * factorial(j - 1) * factorial(k - j) * factorial(2 * j - k));
        }
        v[k] = ((k + h) % 2 == 0 ? 1.0L : -1.0L) * s;
    }
    return v;
}

ld gaver_stehfest(const LaplaceTransform& F, ld y, int N) {
    const std::vector<ld> v = stehfest_weights(N);
    const ld ln2 = 0.693147180559945309417232121458176568L;
    const ld a = ln2 / y;
    ld acc = 0.0L;
    ld biggest = 0.0L;
    for (int k = 1; k <= N; ++k) {
        const ld term = v[k] * std::real(F(cplx(k * a, 0.0L)));
        acc += term;
        biggest = std::max(biggest, std::fabs(term));
    }
    if (biggest > 1e12L * std::fabs(acc)) {
        throw UnstableInversion("invert_laplace: Gaver-Stehfest cancellation exceeds 1e12 dynamic range");
    }
    return acc * a;
}

// Abate & Whitt's Euler algorithm: trapezoid rule for the Bromwich integral
// on Re s = M ln(10) / (3y), the alternating tail summed by binomial averaging.
ld euler(const LaplaceTransform& F, ld y, int M) {
    const ld pi = 3.141592653589793238462643383279502884L;
    const ld A = M * std::log(10.0L) / 3.0L;
    std::vector<ld> xi(2 * M + 1, 1.0L);
    xi[0] = 0.5L;
    xi[2 * M] = std::pow(2.0L, -M);
    ld binom = 1.0L;
    for (int k = 1; k < M; ++k) {
        binom = binom * (M - k + 1) / k;
        xi[2 * M - k] = xi[2 * M - k + 1] + std::pow(2.0L, -M) * binom;
    }
    ld acc = 0.0L;
    for (int k = 0; k <= 2 * M; ++k) {
        const cplx s(A / y, k * pi / y);
        acc += (k % 2 ? -1.0L : 1.0L) * xi[k] * std::real(F(s));
    }
    return std::pow(10.0L, M / 3.0L) / y * acc;
}

} // namespace

double invert_laplace(const LaplaceTransform& Lf, double y, const LaplaceInversionSpec& spec) {
    spec.validate();
    if (!(y > 0.0) || !std::isfinite(y)) throw std::invalid_argument("invert_laplace: y must be positive");

    const ld shift = spec.scale_shift;
    LaplaceTransform shifted = Lf;
    if (shift != 0.0L) shifted = [&Lf, shift](cplx c) { return Lf(c + shift); };

    ld value = 0.0L;
    switch (spec.method) {
    case LaplaceMethod::talbot: value = talbot(shifted, y, spec.n_terms); break;
    case LaplaceMethod::gaver_stehfest: value = gaver_stehfest(shifted, y, spec.n_terms); break;
    case LaplaceMethod::euler: value = euler(shifted, y, spec.n_terms); break;
    }
    if (shift != 0.0L) value *= std::exp(shift * static_cast<ld>(y));
    if (!std::isfinite(static_cast<double>(value)))
        throw UnstableInversion("invert_laplace: non-finite result");
    return static_cast<double>(value);
}

} // namespace svolkit
