#pragma once

// Minimal deterministic parallel loop. Workers write to disjoint indices, so
// results are bit-identical for any worker count. HEISENPERIM_THREADS caps
// the number of workers.

#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace heis {

inline unsigned worker_count() {
    unsigned n = std::thread::hardware_concurrency();
    if (n == 0) n = 1;
    if (const char* env = std::getenv("HEISENPERIM_THREADS")) {
        const long cap = std::strtol(env, nullptr, 10);
        if (cap >= 1 && static_cast<unsigned>(cap) < n) n = static_cast<unsigned>(cap);
        if (cap >= 1 && static_cast<unsigned>(cap) > n) n = static_cast<unsigned>(cap);
    }
    return n;
}

template <class F>
void parallel_for(std::size_t n, F&& body) {
    const unsigned workers = n < 2 ? 1 : std::min<std::size_t>(worker_count(), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&]() {
            constexpr std::size_t chunk = 16;
            for (;;) {
                const std::size_t begin = next.fetch_add(chunk);
                if (begin >= n) return;
                const std::size_t end = std::min(begin + chunk, n);
                for (std::size_t i = begin; i < end; ++i) body(i);
            }
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace heis
