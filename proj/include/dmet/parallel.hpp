#pragma once

#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace dmet::detail {

// WORKBENCH_THREADS caps worker count; unset means hardware concurrency.
inline int max_threads() {
    int hw = static_cast<int>(std::thread::hardware_concurrency());
    if (hw <= 0) hw = 1;
    if (const char* env = std::getenv("WORKBENCH_THREADS")) {
        int cap = std::atoi(env);
        if (cap >= 1 && cap < hw) hw = cap;
    }
    return hw;
}

// Runs fn(begin, end) over a partition of [0, n). Work items must be
// independent; callers merge results deterministically afterwards.
inline void parallel_chunks(int n, const std::function<void(int, int)>& fn) {
    int workers = max_threads();
    if (n < 64 || workers == 1) {
        fn(0, n);
        return;
    }
    if (workers > n) workers = n;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    int chunk = (n + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        int lo = w * chunk;
        int hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&fn, lo, hi] { fn(lo, hi); });
    }
    for (auto& t : pool) t.join();
}

}  // namespace dmet::detail
