#pragma once

#include <cstdlib>
#include <thread>
#include <vector>

namespace ale {

/// Worker count: ALE_THREADS env var if set, otherwise hardware concurrency.
inline unsigned thread_count() {
    if (const char* env = std::getenv("ALE_THREADS")) {
        const long n = std::strtol(env, nullptr, 10);
        if (n >= 1) return static_cast<unsigned>(n);
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? hc : 1;
}

/// parallel_for over [0, n) with static block partitioning.  Results must be
/// written by index so that the output is identical for any worker count.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn, unsigned workers = 0) {
    if (workers == 0) workers = thread_count();
    if (workers <= 1 || n < 2 * workers) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::size_t chunk = (n + workers - 1) / workers;
    for (unsigned t = 0; t < workers; ++t) {
        const std::size_t lo = t * chunk;
        const std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &fn] {
            for (std::size_t i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

} // namespace ale
