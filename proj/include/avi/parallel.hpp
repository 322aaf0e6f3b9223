#pragma once

#include <atomic>
#include <functional>
#include <thread>
#include <vector>

namespace avi {

// Runs fn(i) for i in [0, n) on up to max_threads workers. Each index is
// independent; callers own any per-index output slots, so the result does not
// depend on scheduling.
inline void parallel_for(int n, int max_threads, const std::function<void(int)>& fn) {
    if (n <= 0) return;
    int hw = static_cast<int>(std::thread::hardware_concurrency());
    if (hw <= 0) hw = 1;
    int workers = std::min(n, max_threads > 0 ? std::min(max_threads, hw) : hw);
    if (workers <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                int i = next.fetch_add(1);
                if (i >= n) break;
                fn(i);
            }
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace avi
