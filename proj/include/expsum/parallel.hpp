#pragma once

// Deterministic parallel reduction. Work is cut into fixed-size chunks
// whose partial results are combined in ascending chunk order, so the
// result is bit-identical for every thread count (stronger than the
// 1e-10 cross-thread-count contract).

#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace expsum {

// Number of index items per chunk. Fixed: the chunk layout must not
// depend on the thread count or the reduction order would change.
inline constexpr std::size_t kChunkSize = 256;

inline unsigned normalize_threads(unsigned requested) {
    if (requested == 0) {
        const unsigned hw = std::thread::hardware_concurrency();
        return hw == 0 ? 1 : hw;
    }
    return requested;
}

// Reduces chunk_fn over the index range [0, n). chunk_fn(begin, end)
// returns the partial for one chunk; combine(acc, partial) folds partials
// together in chunk order. chunk_fn must be pure over shared inputs.
template <class Partial, class ChunkFn, class CombineFn>
Partial chunked_reduce(std::size_t n, unsigned threads, Partial init,
                       ChunkFn chunk_fn, CombineFn combine) {
    const std::size_t chunks = (n + kChunkSize - 1) / kChunkSize;
    Partial acc = init;
    threads = normalize_threads(threads);
    if (threads <= 1 || chunks <= 1) {
        for (std::size_t c = 0; c < chunks; ++c) {
            const std::size_t b = c * kChunkSize;
            const std::size_t e = std::min(n, b + kChunkSize);
            Partial part = chunk_fn(b, e);
            combine(acc, part);
        }
        return acc;
    }

    std::vector<Partial> partials(chunks, init);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t c = next.fetch_add(1);
            if (c >= chunks) return;
            const std::size_t b = c * kChunkSize;
            const std::size_t e = std::min(n, b + kChunkSize);
            partials[c] = chunk_fn(b, e);
        }
    };
    std::vector<std::thread> pool;
    const unsigned spawn = unsigned(std::min<std::size_t>(threads, chunks));
    pool.reserve(spawn);
    for (unsigned i = 0; i < spawn; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    for (std::size_t c = 0; c < chunks; ++c) combine(acc, partials[c]);
    return acc;
}

}  // namespace expsum
