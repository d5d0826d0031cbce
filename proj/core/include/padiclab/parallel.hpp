#pragma once

#include <cstdlib>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace padiclab {

// Worker cap from PADIC_LAB_THREADS; unset means single-threaded. The cap
// only controls scheduling, never results: every parallel_for body writes
// its own slot.
inline int thread_budget() {
    const char* env = std::getenv("PADIC_LAB_THREADS");
    if (!env || !*env)
        return 1;
    int n = 0;
    try {
        n = std::stoi(env);
    } catch (const std::exception&) {
        throw std::invalid_argument("PADIC_LAB_THREADS must be a positive integer");
    }
    if (n < 1)
        throw std::invalid_argument("PADIC_LAB_THREADS must be a positive integer");
    return n < 64 ? n : 64;
}

/**
 * Run fn(i) for i in [0, n), statically strided across `threads` workers
 * (0 = the environment budget). Output must go into per-index slots; with
 * that discipline the result is byte-for-byte independent of the thread
 * count. The first exception thrown by any body is rethrown after join.
 */
template <typename F>
void parallel_for(std::size_t n, F&& fn, int threads = 0) {
    int budget = threads > 0 ? threads : thread_budget();
    if (budget == 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i)
            fn(i);
        return;
    }
    std::size_t workers = static_cast<std::size_t>(budget) < n
                              ? static_cast<std::size_t>(budget)
                              : n;
    std::exception_ptr first;
    std::mutex gate;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < n; i += workers) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(gate);
                    if (!first)
                        first = std::current_exception();
                    return;
                }
            }
        });
    for (auto& t : pool)
        t.join();
    if (first)
        std::rethrow_exception(first);
}

}  // namespace padiclab
