/// @file parallel.hpp
/// @brief Fork-join loop over independent subdomain work items.

#ifndef FETISTOKES_CORE_PARALLEL_HPP
#define FETISTOKES_CORE_PARALLEL_HPP

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "types.hpp"

namespace fetistokes {

/// Runs fn(0..n-1); concurrently when `parallel` is set. Results must be
/// written to disjoint slots so that the caller can reduce them in a fixed
/// order afterwards (keeps runs bitwise reproducible).
template <typename Fn>
inline void for_each_subdomain(index_t n, bool parallel, Fn&& fn) {
    if (!parallel || n < 2) {
        for (index_t i = 0; i < n; ++i) fn(i);
        return;
    }
    unsigned hw = std::thread::hardware_concurrency();
    unsigned nt = hw == 0 ? 2u : hw;
    if (nt > static_cast<unsigned>(n)) nt = static_cast<unsigned>(n);
    std::atomic<index_t> next{0};
    std::exception_ptr err;
    std::mutex err_mutex;
    std::vector<std::thread> workers;
    workers.reserve(nt);
    for (unsigned t = 0; t < nt; ++t)
        workers.emplace_back([&] {
            for (;;) {
                index_t i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(err_mutex);
                    if (!err) err = std::current_exception();
                    return;
                }
            }
        });
    for (auto& w : workers) w.join();
    if (err) std::rethrow_exception(err);
}

} // namespace fetistokes

#endif // FETISTOKES_CORE_PARALLEL_HPP
