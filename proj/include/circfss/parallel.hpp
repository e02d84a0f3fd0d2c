#pragma once

#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace circfss {

/// Runs fn(i) for i in [0, count) on up to `workers` threads.
/// Callers must make fn(i) depend only on i (e.g. via Rng::derive with the
/// index as counter) and write to disjoint slots, so results do not depend
/// on the worker count.
template <typename Fn>
void parallel_for(std::size_t count, unsigned workers, Fn&& fn) {
    if (workers <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    if (workers > count) workers = static_cast<unsigned>(count);
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w]() {
            try {
                for (std::size_t i = w; i < count; i += workers) fn(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

/// Default worker count; overridable via the CIRCFSS_WORKERS environment
/// variable (the only environment override the tools honor).
unsigned default_workers();

}  // namespace circfss
