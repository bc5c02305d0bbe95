#pragma once

#include <functional>
#include <thread>
#include <vector>

namespace tempo {

inline int resolve_threads(int requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

// Static block partition over [0, n). Each index is visited exactly once and
// workers write to disjoint rows, so results match the serial order bitwise.
inline void parallel_for(long n, int threads, const std::function<void(long)>& fn) {
    threads = resolve_threads(threads);
    if (threads <= 1 || n < 2 * threads) {
        for (long i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(threads);
    const long chunk = (n + threads - 1) / threads;
    for (int w = 0; w < threads; ++w) {
        const long begin = w * chunk;
        const long end = std::min(n, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back([begin, end, &fn] {
            for (long i = begin; i < end; ++i) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace tempo
