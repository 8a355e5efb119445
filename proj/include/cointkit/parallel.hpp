// parallel.hpp
// Deterministic data-parallel helper. Work item i writes only slot i of a
// caller-owned output, so results are identical for any thread count.

#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace cointkit {

/// Process-wide default for internal parallelism. 1 means sequential.
inline int& default_threads() {
    static int n = 1;
    return n;
}

/// Runs fn(i) for i in [0, n). fn must not touch state shared across indices.
/// threads <= 0 uses default_threads(). The first exception thrown by any
/// worker is rethrown after all workers join.
template <typename Fn>
void parallel_for_index(std::size_t n, Fn&& fn, int threads = 0) {
    if (threads <= 0) threads = default_threads();
    if (threads < 1) threads = 1;
    const std::size_t workers =
        std::min<std::size_t>(static_cast<std::size_t>(threads), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::atomic<bool> failed{false};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
                if (i >= n || failed.load(std::memory_order_relaxed)) return;
                try {
                    fn(i);
                } catch (...) {
                    bool expected = false;
                    if (failed.compare_exchange_strong(expected, true))
                        first_error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failed.load()) std::rethrow_exception(first_error);
}

} // namespace cointkit
