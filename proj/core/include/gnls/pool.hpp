#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>
#include <vector>

namespace gnls {

// Runs fn(i) for i in [0, n) on up to `workers` threads. Tasks are handed out by index; any
// result ordering is left to the caller, who writes into slot i. The exception of the lowest
// failing index is rethrown after all threads joined.
template <class Fn>
void parallel_for(int n, int workers, Fn&& fn) {
    if (n <= 0) return;
    workers = std::clamp(workers, 1, n);
    std::vector<std::exception_ptr> errors(n);
    std::atomic<int> next{0};
    auto work = [&] {
        for (int i = next++; i < n; i = next++) {
            try {
                fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> ts;
        ts.reserve(workers);
        for (int w = 0; w < workers; ++w) ts.emplace_back(work);
        for (auto& t : ts) t.join();
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace gnls
