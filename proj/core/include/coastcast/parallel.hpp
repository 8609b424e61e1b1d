#pragma once

#include <cstddef>
#include <thread>
#include <vector>

namespace coastcast {

// 0 means "use hardware concurrency".
std::size_t resolve_threads(std::size_t requested);

// Static partition of [0, n) into `threads` contiguous chunks. fn is called
// as fn(chunk_index, begin, end); callers merge per-chunk results in chunk
// order so the reduction is independent of scheduling.
template <typename Fn>
void parallel_chunks(std::size_t n, std::size_t threads, Fn&& fn) {
    threads = resolve_threads(threads);
    if (threads > n) threads = n == 0 ? 1 : n;
    if (threads <= 1) {
        fn(std::size_t{0}, std::size_t{0}, n);
        return;
    }
    const std::size_t chunk = (n + threads - 1) / threads;
    std::vector<std::thread> pool;
    pool.reserve(threads - 1);
    for (std::size_t t = 1; t < threads; ++t) {
        const std::size_t begin = t * chunk;
        const std::size_t end = std::min(n, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back([&fn, t, begin, end] { fn(t, begin, end); });
    }
    fn(std::size_t{0}, std::size_t{0}, std::min(n, chunk));
    for (auto& th : pool) th.join();
}

} // namespace coastcast
