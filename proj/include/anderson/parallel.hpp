#pragma once

// Replicate-level parallelism with bitwise-deterministic reduction: work
// is split into fixed-size chunks keyed by index, partial results live in
// per-chunk slots, and the caller merges them in chunk order. The merged
// result does not depend on the thread count or on scheduling.

#include <atomic>
#include <functional>
#include <thread>
#include <vector>

namespace anderson {

inline int default_threads() {
    const unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : int(n);
}

// Calls body(chunk_index, begin, end) for consecutive index ranges covering
// [0, n). Chunk boundaries depend only on n and chunk_size.
template <class Body>
void parallel_chunks(long n, int threads, long chunk_size, Body&& body) {
    if (n <= 0) return;
    const long chunks = (n + chunk_size - 1) / chunk_size;
    if (threads <= 1 || chunks == 1) {
        for (long c = 0; c < chunks; ++c)
            body(c, c * chunk_size, std::min(n, (c + 1) * chunk_size));
        return;
    }
    std::atomic<long> next{0};
    auto worker = [&] {
        for (;;) {
            const long c = next.fetch_add(1);
            if (c >= chunks) return;
            body(c, c * chunk_size, std::min(n, (c + 1) * chunk_size));
        }
    };
    std::vector<std::thread> pool;
    const int use = int(std::min<long>(threads, chunks));
    pool.reserve(use);
    for (int i = 0; i < use; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
}

}  // namespace anderson
