#pragma once

#include <atomic>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace sc2dec {

// Runs fn(i) for i in [0, count) on up to `workers` threads and returns the
// results in input order. The first exception is rethrown after all workers
// drain.
template <typename Result>
std::vector<Result> parallel_map_ordered(size_t count, int workers,
                                         const std::function<Result(size_t)>& fn) {
    std::vector<Result> results(count);
    if (count == 0) return results;

    int n = std::max(1, workers);
    if (static_cast<size_t>(n) > count) n = static_cast<int>(count);
    if (n == 1) {
        for (size_t i = 0; i < count; ++i) results[i] = fn(i);
        return results;
    }

    std::atomic<size_t> next{0};
    std::mutex err_mutex;
    std::exception_ptr first_error;

    auto worker = [&] {
        while (true) {
            size_t i = next.fetch_add(1);
            if (i >= count) return;
            {
                std::lock_guard lock(err_mutex);
                if (first_error) return;
            }
            try {
                results[i] = fn(i);
            } catch (...) {
                std::lock_guard lock(err_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(n);
    for (int t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();

    if (first_error) std::rethrow_exception(first_error);
    return results;
}

}  // namespace sc2dec
