#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace emp {

/// Worker count: EMP_THREADS if set to a positive integer, else hardware concurrency.
inline std::size_t thread_count() {
    if (const char* env = std::getenv("EMP_THREADS")) {
        try {
            const long v = std::stol(env);
            if (v > 0) return static_cast<std::size_t>(v);
        } catch (...) {
        }
    }
    return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

/// Calls fn(i) for i in [0, n) across workers. Work items must write to disjoint slots;
/// the first exception thrown by any item is rethrown after all workers join.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
    const std::size_t workers = std::min(thread_count(), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::exception_ptr first_error;
    std::mutex error_mutex;
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                for (std::size_t i = w; i < n; i += workers) {
                    try {
                        fn(i);
                    } catch (...) {
                        std::lock_guard lock(error_mutex);
                        if (!first_error) first_error = std::current_exception();
                        return;
                    }
                }
            });
        }
    }
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace emp
