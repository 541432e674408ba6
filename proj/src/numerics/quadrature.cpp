#include "svolkit/numerics.hpp"
#include "svolkit/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

namespace svolkit {

void QuadratureSpec::validate() const {
    if (!(abs_tol > 0.0)) throw std::invalid_argument("QuadratureSpec: abs_tol must be > 0");
    if (!(rel_tol > 0.0)) throw std::invalid_argument("QuadratureSpec: rel_tol must be > 0");
    if (max_subdivisions < 1) throw std::invalid_argument("QuadratureSpec: max_subdivisions must be >= 1");
}

namespace {

// Kronrod abscissae and weights (15 point) with the embedded 7 point Gauss weights.
constexpr double xgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                           0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                           0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                           0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double wgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                           0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                           0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                           0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double wg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                          0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
    double a, b, value, err;
    bool operator<(const Segment& o) const { return err < o.err; }
};

template <class F>
Segment gk15(const F& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const double fc = f(c);
    double resg = fc * wg[3];
    double resk = fc * wgk[7];
    double resabs = std::abs(resk);
    double fv1[7], fv2[7];
    for (int j = 0; j < 7; ++j) {
        const double dx = h * xgk[j];
        const double f1 = f(c - dx);
        const double f2 = f(c + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        resk += wgk[j] * (f1 + f2);
        resabs += wgk[j] * (std::abs(f1) + std::abs(f2));
        if (j % 2 == 1) resg += wg[j / 2] * (f1 + f2);
    }
    const double reskh = resk * 0.5;
    double resasc = wgk[7] * std::abs(fc - reskh);
    for (int j = 0; j < 7; ++j) resasc += wgk[j] * (std::abs(fv1[j] - reskh) + std::abs(fv2[j] - reskh));

    const double result = resk * h;
    resabs *= std::abs(h);
    resasc *= std::abs(h);
    double err = std::abs((resk - resg) * h);
    if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    constexpr double eps = std::numeric_limits<double>::epsilon();
    if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) err = std::max(err, 50.0 * eps * resabs);
    return {a, b, result, err};
}

template <class F>
QuadResult adapt(const F& f, double a, double b, const QuadratureSpec& spec) {
    std::priority_queue<Segment> heap;
    Segment first = gk15(f, a, b);
    double total = first.value;
    double total_err = first.err;
    heap.push(first);
    int n = 1;
    auto tolerance = [&] { return std::max(spec.abs_tol, spec.rel_tol * std::abs(total)); };
    while (total_err > tolerance()) {
        if (n >= spec.max_subdivisions) {
            throw NonConvergence("integrate_1d: subdivision limit reached (err " + std::to_string(total_err) +
                                 ", target " + std::to_string(tolerance()) + ")");
        }
        Segment worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) {
            throw NonConvergence("integrate_1d: interval collapsed to machine precision");
        }
        Segment left = gk15(f, worst.a, mid);
        Segment right = gk15(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        total_err += left.err + right.err - worst.err;
        heap.push(left);
        heap.push(right);
        ++n;
    }
    // Re-sum to avoid drift from the incremental updates.
    double v = 0.0, e = 0.0;
    while (!heap.empty()) {
        v += heap.top().value;
        e += heap.top().err;
        heap.pop();
    }
    return {v, e};
}

} // namespace

QuadResult integrate_1d(const RealFn& f, double lower, double upper, const QuadratureSpec& spec) {
    spec.validate();
    if (std::isnan(lower) || std::isnan(upper)) throw std::invalid_argument("integrate_1d: NaN limit");
    if (lower == upper) return {0.0, 0.0};
    if (lower > upper) {
        QuadResult r = integrate_1d(f, upper, lower, spec);
        return {-r.value, r.err_est};
    }

    auto checked = [&f](double x) {
        const double v = f(x);
        if (!std::isfinite(v)) {
            throw NonFiniteIntegrand("integrate_1d: integrand is not finite at x = " + std::to_string(x));
        }
        return v;
    };

    if (std::isinf(upper) && std::holds_alternative<FixedUpperBound>(spec.truncation)) {
        upper = std::get<FixedUpperBound>(spec.truncation).upper;
        if (!(upper > lower)) throw std::invalid_argument("integrate_1d: fixed upper bound below lower limit");
    }

    if (std::isinf(lower) && std::isinf(upper)) {
        QuadratureSpec half = spec;
        half.abs_tol = 0.5 * spec.abs_tol;
        QuadResult l = integrate_1d(f, lower, 0.0, half);
        QuadResult r = integrate_1d(f, 0.0, upper, half);
        return {l.value + r.value, l.err_est + r.err_est};
    }
    if (std::isinf(upper)) {
        auto g = [&](double u) {
            if (u >= 1.0) return 0.0;
            const double w = 1.0 - u;
            return checked(lower + u / w) / (w * w);
        };
        return adapt(g, 0.0, 1.0, spec);
    }
    if (std::isinf(lower)) {
        auto g = [&](double u) {
            if (u >= 1.0) return 0.0;
            const double w = 1.0 - u;
            return checked(upper - u / w) / (w * w);
        };
        return adapt(g, 0.0, 1.0, spec);
    }
    return adapt(checked, lower, upper, spec);
}

QuadResult oscillatory_integrate(const RealFn& f, double frequency, double lower, const QuadratureSpec& spec) {
    spec.validate();
    if (!(frequency > 0.0) || !std::isfinite(frequency)) {
        throw std::invalid_argument("oscillatory_integrate: frequency_hint must be positive");
    }
    if (!std::isfinite(lower)) throw std::invalid_argument("oscillatory_integrate: lower limit must be finite");

    const double period = M_PI / frequency;
    const double k0 = std::floor(lower / period) + 1.0;

    // Each half-period integral is done to a fraction of the overall tolerance.
    QuadratureSpec piece = spec;
    piece.abs_tol = 0.1 * spec.abs_tol;
    piece.truncation = TailEstimate{};

    constexpr int max_terms = 4000;
    constexpr int euler_levels = 12;
    std::vector<double> partial;
    partial.reserve(256);
    double sum = 0.0;
    double err_pieces = 0.0;

    double a = lower;
    double prev_est = 0.0;
    double prev_diff = std::numeric_limits<double>::infinity();
    int small_terms = 0;
    for (int k = 0; k < max_terms; ++k) {
        const double b = (k0 + k) * period;
        QuadResult q = integrate_1d(f, a, b, piece);
        sum += q.value;
        err_pieces += q.err_est;
        partial.push_back(sum);
        a = b;

        // Euler transform over the last m partial sums (binomial averaging).
        const int n = static_cast<int>(partial.size());
        const int m = std::min(euler_levels, n - 1);
        std::vector<double> row(partial.end() - (m + 1), partial.end());
        for (int level = 0; level < m; ++level)
            for (int i = 0; i + 1 < static_cast<int>(row.size()) - level; ++i) row[i] = 0.5 * (row[i] + row[i + 1]);
        const double est = row[0];

        const double tol = std::max(spec.abs_tol, spec.rel_tol * std::abs(est));
        const double diff = std::abs(est - prev_est);
        if (std::abs(q.value) <= 0.01 * tol) {
            ++small_terms;
        } else {
            small_terms = 0;
        }
        // Terms negligible: the plain partial sum is already converged.
        if (small_terms >= 3) return {sum, err_pieces + std::abs(q.value) * 3.0};
        if (n > 4 && diff <= tol && prev_diff <= tol) return {est, err_pieces + diff + prev_diff};
        prev_diff = diff;
        prev_est = est;
    }
    throw NonConvergence("oscillatory_integrate: series acceleration stalled");
}

GaussRule gauss_legendre(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
    GaussRule g;
    g.nodes.resize(n);
    g.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 1.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        g.nodes[i] = -x;
        g.nodes[n - 1 - i] = x;
        g.weights[i] = g.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) g.nodes[n / 2] = 0.0;
    return g;
}

} // namespace svolkit
