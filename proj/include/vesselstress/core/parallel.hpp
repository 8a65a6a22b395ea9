#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace vesselstress {

/// Worker count: hardware concurrency, capped by VESSELSTRESS_THREADS when set.
inline int worker_count() {
    int hw = static_cast<int>(std::thread::hardware_concurrency());
    if (hw <= 0) hw = 1;
    if (const char* env = std::getenv("VESSELSTRESS_THREADS")) {
        try {
            int cap = std::stoi(env);
            if (cap >= 1) hw = std::min(hw, cap);
        } catch (const std::exception&) {
        }
    }
    return hw;
}

/// Static contiguous partition of [0, n) over `threads` workers; fn(lo, hi, worker).
/// The partition depends only on n and threads, so per-worker results can be
/// merged in worker order for reproducible output.
template <typename Fn>
void parallel_ranges(std::size_t n, int threads, Fn&& fn) {
    threads = std::max(1, std::min<int>(threads, static_cast<int>(std::max<std::size_t>(n, 1))));
    if (threads == 1) {
        fn(std::size_t{0}, n, 0);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) {
        std::size_t lo = n * t / threads;
        std::size_t hi = n * (t + 1) / threads;
        pool.emplace_back([&, lo, hi, t] {
            try {
                fn(lo, hi, t);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace vesselstress
