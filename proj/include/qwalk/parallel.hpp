#pragma once

// Minimal chunked parallel-for over an index range. Work is split into
// contiguous chunks so each thread writes a disjoint slice; results are
// bit-identical for any thread count.

#include <atomic>
#include <cstdint>
#include <exception>
#include <stdexcept>
#include <thread>
#include <vector>

namespace qwalk {

inline std::atomic<unsigned>& thread_count_ref() {
    static std::atomic<unsigned> count{std::max(1u, std::thread::hardware_concurrency())};
    return count;
}

// Process-wide worker count used by the lattice kernels. Set once at startup.
inline void set_thread_count(unsigned n) {
    if (n == 0) throw std::invalid_argument("set_thread_count: n must be positive");
    thread_count_ref().store(n);
}

inline unsigned thread_count() { return thread_count_ref().load(); }

// Invokes fn(begin, end) on disjoint chunks covering [0, n).
template <typename Fn>
void parallel_for(std::int64_t n, Fn&& fn) {
    if (n <= 0) return;
    const std::int64_t want = static_cast<std::int64_t>(thread_count());
    const std::int64_t workers = std::min<std::int64_t>(want, n);
    if (workers <= 1) {
        fn(std::int64_t{0}, n);
        return;
    }
    const std::int64_t chunk = (n + workers - 1) / workers;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers - 1));
    std::exception_ptr error;
    std::atomic<bool> failed{false};
    auto run = [&](std::int64_t begin, std::int64_t end) {
        try {
            fn(begin, end);
        } catch (...) {
            if (!failed.exchange(true)) error = std::current_exception();
        }
    };
    for (std::int64_t w = 1; w < workers; ++w) {
        const std::int64_t begin = w * chunk;
        const std::int64_t end = std::min(n, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back(run, begin, end);
    }
    run(0, std::min(n, chunk));
    for (auto& t : pool) t.join();
    if (failed.load()) std::rethrow_exception(error);
}

}  // namespace qwalk
