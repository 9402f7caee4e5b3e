#pragma once

#include "weq/types.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <functional>
#include <limits>
#include <string>
#include <thread>
#include <vector>

namespace weq {

/// Quantile with linear interpolation between order statistics (R type 7).
inline Scalar percentile(std::vector<Scalar> values, Scalar p) {
    const std::size_t m = values.size();
    if (m == 0) return std::numeric_limits<Scalar>::quiet_NaN();
    std::sort(values.begin(), values.end());
    if (p <= 0.0) return values.front();
    if (p >= 1.0) return values.back();
    const Scalar h = static_cast<Scalar>(m - 1) * p;
    const std::size_t lo = static_cast<std::size_t>(h);
    const Scalar frac = h - static_cast<Scalar>(lo);
    if (lo + 1 >= m) return values.back();
    return values[lo] + frac * (values[lo + 1] - values[lo]);
}

inline Scalar mean_of(const std::vector<Scalar>& values) {
    if (values.empty()) return std::numeric_limits<Scalar>::quiet_NaN();
    Scalar s = 0.0;
    for (Scalar v : values) s += v;
    return s / static_cast<Scalar>(values.size());
}

/// Shortest round-trip decimal representation.
inline std::string format_double(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

/// Index-sliced parallel loop. Each index is processed exactly once and
/// writes only to its own slot, so results are identical for any thread
/// count.
inline void parallel_for(Index n, const std::function<void(Index)>& fn,
                         unsigned threads = 0) {
    if (threads == 0) threads = std::thread::hardware_concurrency();
    if (threads <= 1 || n < 2) {
        for (Index i = 0; i < n; ++i) fn(i);
        return;
    }
    threads = std::min<unsigned>(threads, static_cast<unsigned>(n));
    std::vector<std::thread> pool;
    pool.reserve(threads);
    std::atomic<Index> next{0};
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (;;) {
                const Index i = next.fetch_add(1);
                if (i >= n) break;
                fn(i);
            }
        });
    }
    for (auto& th : pool) th.join();
}

} // namespace weq
