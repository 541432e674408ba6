#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace svolkit {

// Worker count: explicit request, else SVOLKIT_THREADS, else hardware concurrency.
int resolve_threads(int requested);

// Paths are processed in fixed blocks so the reduction order never depends
// on the number of workers.
constexpr long kBlockSize = 1024;

// Runs block(b, begin, end) -> Acc for every block of [0, n), then merges
// the block results pairwise in block order.  Acc needs merge(const Acc&).
template <class Acc, class BlockFn>
Acc parallel_blocks(long n, int threads, const Acc& empty, BlockFn block) {
    const long n_blocks = (n + kBlockSize - 1) / kBlockSize;
    std::vector<Acc> parts(static_cast<std::size_t>(n_blocks), empty);
    const int workers = static_cast<int>(std::max<long>(1, std::min<long>(resolve_threads(threads), n_blocks)));

    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto run = [&](int w) {
        try {
            for (long b = w; b < n_blocks; b += workers) {
                const long begin = b * kBlockSize;
                parts[static_cast<std::size_t>(b)] = block(b, begin, std::min(n, begin + kBlockSize));
            }
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
    if (parts.empty()) return empty;

    for (std::size_t width = 1; width < parts.size(); width *= 2)
        for (std::size_t i = 0; i + width < parts.size(); i += 2 * width) parts[i].merge(parts[i + width]);
    return parts[0];
}

// Running mean / variance (Welford, Chan merge) for several quantities that
// are observed together once per path.
struct MomentSums {
    std::vector<double> mean_, m2_;
    long n = 0;

    MomentSums() = default;
    explicit MomentSums(std::size_t k) : mean_(k, 0.0), m2_(k, 0.0) {}

    // Call once per path with all k values.
    template <class Values>
    void add(const Values& v) {
        ++n;
        for (std::size_t i = 0; i < mean_.size(); ++i) {
            const double d = v[i] - mean_[i];
            mean_[i] += d / n;
            m2_[i] += d * (v[i] - mean_[i]);
        }
    }
    void merge(const MomentSums& o) {
        if (o.n == 0) return;
        if (n == 0) {
            *this = o;
            return;
        }
        const double na = static_cast<double>(n), nb = static_cast<double>(o.n), nt = na + nb;
        for (std::size_t i = 0; i < mean_.size(); ++i) {
            const double d = o.mean_[i] - mean_[i];
            mean_[i] += d * nb / nt;
            m2_[i] += o.m2_[i] + d * d * na * nb / nt;
        }
        n += o.n;
    }
    double mean(std::size_t i) const { return mean_[i]; }
    double variance(std::size_t i) const { return n > 1 ? m2_[i] / (n - 1) : 0.0; }
    double stderr_of(std::size_t i) const { return n > 1 ? std::sqrt(variance(i) / n) : 0.0; }
};

} // namespace svolkit
