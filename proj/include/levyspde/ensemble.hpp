#pragma once

#include <thread>
#include <vector>

namespace levyspde {

inline int resolve_threads(int requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

// Run fn(i) for i in [0, count) on up to `threads` workers. fn must only touch
// slot i of shared state; reductions happen afterwards in index order, so
// results are independent of the thread count.
template <class Fn>
void parallel_trajectories(int count, int threads, Fn&& fn) {
    threads = std::min(resolve_threads(threads), count > 0 ? count : 1);
    if (threads <= 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int w = 0; w < threads; ++w) {
        pool.emplace_back([&fn, w, threads, count] {
            for (int i = w; i < count; i += threads) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

} // namespace levyspde
