#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace dfderiv {

/**
 * Splits [0, count) into `partitions` contiguous ranges, runs fn(begin, end)
 * on each (one thread per extra range) and returns the results in range
 * order. The first exception thrown by any range is rethrown.
 */
template <class Fn>
auto run_partitioned(std::size_t count, std::size_t partitions, Fn&& fn) {
    using R = decltype(fn(std::size_t{}, std::size_t{}));
    partitions = std::max<std::size_t>(1, std::min(partitions, std::max<std::size_t>(count, 1)));
    std::vector<R> results(partitions);
    std::vector<std::exception_ptr> errors(partitions);
    auto bounds = [&](std::size_t p) { return count * p / partitions; };
    auto run = [&](std::size_t p) {
        try {
            results[p] = fn(bounds(p), bounds(p + 1));
        } catch (...) {
            errors[p] = std::current_exception();
        }
    };
    std::vector<std::thread> threads;
    for (std::size_t p = 1; p < partitions; ++p) threads.emplace_back(run, p);
    run(0);
    for (auto& t : threads) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return results;
}

} // namespace dfderiv
