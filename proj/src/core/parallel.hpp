#pragma once

#include <atomic>
#include <functional>
#include <thread>
#include <vector>

namespace sdgf {

/// Runs fn(begin, end) over [0, count) split into fixed-size blocks claimed by
/// an atomic counter. Blocks write disjoint outputs, so results are identical
/// for any worker count; only wall-clock time changes.
inline void parallel_for_blocks(int count, int threads, int block,
                                const std::function<void(int, int)>& fn) {
    if (count <= 0) return;
    if (block < 1) block = 1;
    if (threads <= 1 || count <= block) {
        for (int begin = 0; begin < count; begin += block)
            fn(begin, std::min(begin + block, count));
        return;
    }
    std::atomic<int> next{0};
    auto worker = [&] {
        for (;;) {
            const int begin = next.fetch_add(block);
            if (begin >= count) return;
            fn(begin, std::min(begin + block, count));
        }
    };
    std::vector<std::thread> pool;
    const int n = std::min(threads, (count + block - 1) / block);
    pool.reserve(n - 1);
    for (int i = 1; i < n; ++i) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
}

/// Convenience wrapper: one call per index row.
inline void parallel_rows(int rows, int threads, const std::function<void(int)>& fn) {
    parallel_for_blocks(rows, threads, 8, [&](int begin, int end) {
        for (int y = begin; y < end; ++y) fn(y);
    });
}

}  // namespace sdgf
