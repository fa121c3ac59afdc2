#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace svote {

inline unsigned plan_workers(std::size_t n, unsigned n_workers) {
    if (n_workers <= 1 || n < 2) return 1;
    return static_cast<unsigned>(std::min<std::size_t>(n_workers, n));
}

// Runs body(worker, lo, hi) over a contiguous partition of [0, n). Callers key
// all randomness by item index and merge per-worker results with order-free
// reductions, so the worker count never changes the output.
template <typename Body>
void parallel_for(std::size_t n, unsigned n_workers, Body&& body) {
    if (n == 0) return;
    const unsigned w = plan_workers(n, n_workers);
    if (w == 1) {
        body(0u, std::size_t{0}, n);
        return;
    }
    const std::size_t chunk = (n + w - 1) / w;
    std::vector<std::thread> pool;
    pool.reserve(w);
    for (unsigned id = 0; id < w; ++id) {
        const std::size_t lo = static_cast<std::size_t>(id) * chunk;
        if (lo >= n) break;
        const std::size_t hi = std::min(n, lo + chunk);
        pool.emplace_back([&body, id, lo, hi] { body(id, lo, hi); });
    }
    for (auto& t : pool) t.join();
}

}  // namespace svote
