#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace pythag {

/// Evaluate fn(0..tasks-1) on up to `threads` workers and return the results by index.
///
/// Workers claim task indices from an atomic counter and write only their own
/// result slot, so the output (and any reduction over it in index order) does not
/// depend on the thread count. The first exception thrown by a task is rethrown.
template <typename F>
auto parallel_map(std::size_t tasks, unsigned threads, F&& fn) {
    using R = decltype(fn(std::size_t{0}));
    std::vector<R> out(tasks);
    if (threads <= 1 || tasks <= 1) {
        for (std::size_t i = 0; i < tasks; ++i) out[i] = fn(i);
        return out;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= tasks) return;
            try {
                out[i] = fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    unsigned count = static_cast<unsigned>(std::min<std::size_t>(threads, tasks));
    for (unsigned t = 0; t < count; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
    return out;
}

} // namespace pythag
