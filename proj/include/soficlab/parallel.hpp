#pragma once

#include <cstddef>
#include <thread>
#include <vector>

namespace soficlab {

// Runs fn(i) for i in [0, count) on up to `threads` workers with a static
// block partition. Each index gets the same work regardless of the worker
// count, so results written into index-addressed slots are deterministic.
template <typename Fn>
void parallel_for(size_t count, unsigned threads, Fn&& fn) {
    if (threads <= 1 || count <= 1) {
        for (size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    unsigned workers = threads;
    if (workers > count) workers = static_cast<unsigned>(count);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const size_t chunk = (count + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
        const size_t lo = static_cast<size_t>(w) * chunk;
        const size_t hi = std::min(count, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &fn]() {
            for (size_t i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace soficlab
