#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "latdecor/error.hpp"

namespace latdecor {

/// Environment variable holding the worker count for Monte Carlo loops.
inline constexpr const char* kThreadsEnvVar = "LATDECOR_THREADS";

/// Samples per accumulation block. Blocks, not workers, are the unit of the
/// deterministic merge.
inline constexpr std::uint64_t kBlockSize = 1024;

/// Running count, mean, sum of squared deviations and maximum.
struct Moments {
    std::uint64_t n = 0;
    double mean = 0.0;
    double m2 = 0.0;
    double max = -std::numeric_limits<double>::infinity();

    void add(double x) {
        ++n;
        const double delta = x - mean;
        mean += delta / static_cast<double>(n);
        m2 += delta * (x - mean);
        max = std::max(max, x);
    }

    /// Chan et al. pairwise combination.
    static Moments merge(const Moments& a, const Moments& b) {
        if (a.n == 0) return b;
        if (b.n == 0) return a;
        Moments r;
        r.n = a.n + b.n;
        const double na = static_cast<double>(a.n), nb = static_cast<double>(b.n), n = static_cast<double>(r.n);
        const double delta = b.mean - a.mean;
        r.mean = a.mean + delta * (nb / n);
        r.m2 = a.m2 + b.m2 + delta * delta * (na * nb / n);
        r.max = std::max(a.max, b.max);
        return r;
    }
};

/// A Monte Carlo mean with its standard error; the unit of every empirical claim.
struct Estimate {
    double mean = 0.0;
    double std_error = 0.0;  // sample standard deviation / sqrt(n_samples)
    std::uint64_t n_samples = 0;
    std::uint64_t seed = 0;
    double max_sample = 0.0;

    static Estimate from_moments(const Moments& m, std::uint64_t seed) {
        Estimate e;
        e.mean = m.mean;
        e.n_samples = m.n;
        e.seed = seed;
        e.max_sample = m.n ? m.max : 0.0;
        e.std_error = m.n > 1 ? std::sqrt(m.m2 / static_cast<double>(m.n - 1) / static_cast<double>(m.n)) : 0.0;
        return e;
    }

    friend bool operator==(const Estimate&, const Estimate&) = default;
};

/// Worker count from LATDECOR_THREADS, defaulting to the hardware concurrency.
inline int worker_count() {
    if (const char* env = std::getenv(kThreadsEnvVar)) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v >= 1 && v <= 1024) return static_cast<int>(v);
    }
    return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

namespace detail {

template <std::size_t K>
std::array<Moments, K> merge_tree(const std::vector<std::array<Moments, K>>& blocks, std::size_t lo,
                                  std::size_t hi) {
    if (hi - lo == 1) return blocks[lo];
    const std::size_t mid = lo + (hi - lo) / 2;
    const auto a = merge_tree(blocks, lo, mid), b = merge_tree(blocks, mid, hi);
    std::array<Moments, K> r;
    for (std::size_t k = 0; k < K; ++k) r[k] = Moments::merge(a[k], b[k]);
    return r;
}

}  // namespace detail

/// Accumulate K statistics over sample indices [0, n). `fn(i)` returns the K
/// values of sample i. Results depend only on `fn` and `n`: each block of
/// kBlockSize consecutive indices is folded in order, and block results are
/// combined by a fixed binary tree over block indices.
template <std::size_t K, class Fn>
std::array<Moments, K> accumulate_samples(std::uint64_t n, Fn&& fn, int workers = worker_count()) {
    std::array<Moments, K> empty{};
    if (n == 0) return empty;
    const std::uint64_t nblocks = (n + kBlockSize - 1) / kBlockSize;
    std::vector<std::array<Moments, K>> blocks(static_cast<std::size_t>(nblocks));
    std::atomic<std::uint64_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto work = [&] {
        try {
            for (std::uint64_t b; (b = next.fetch_add(1)) < nblocks;) {
                std::array<Moments, K> acc{};
                const std::uint64_t end = std::min(n, (b + 1) * kBlockSize);
                for (std::uint64_t i = b * kBlockSize; i < end; ++i) {
                    const std::array<double, K> v = fn(i);
                    for (std::size_t k = 0; k < K; ++k) acc[k].add(v[k]);
                }
                blocks[static_cast<std::size_t>(b)] = acc;
            }
        } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next.store(nblocks);
        }
    };

    const int w = static_cast<int>(std::min<std::uint64_t>(static_cast<std::uint64_t>(std::max(1, workers)), nblocks));
    if (w == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(static_cast<std::size_t>(w));
        for (int i = 0; i < w; ++i) pool.emplace_back(work);
    }
    if (failure) std::rethrow_exception(failure);
    return detail::merge_tree(blocks, 0, blocks.size());
}

/// Single-statistic convenience wrapper.
template <class Fn>
Estimate estimate_mean(std::uint64_t n, std::uint64_t seed, Fn&& fn, int workers = worker_count()) {
    const auto m = accumulate_samples<1>(n, [&](std::uint64_t i) { return std::array<double, 1>{fn(i)}; }, workers);
    return Estimate::from_moments(m[0], seed);
}

}  // namespace latdecor
