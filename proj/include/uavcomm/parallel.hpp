#ifndef UAVCOMM_PARALLEL_HPP
#define UAVCOMM_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <optional>
#include <thread>
#include <type_traits>
#include <vector>

namespace uavcomm {

/// Evaluates fn(0) .. fn(n-1) and returns the results in index order. With
/// `parallel` set, indices are handed out to a pool of worker threads; the
/// output does not depend on scheduling. The first exception by index is
/// rethrown after all workers finish.
template <typename Fn>
auto parallel_map(std::size_t n, Fn&& fn, bool parallel)
    -> std::vector<std::invoke_result_t<Fn&, std::size_t>>
{
    using Result = std::invoke_result_t<Fn&, std::size_t>;
    std::vector<std::optional<Result>> slots(n);
    std::vector<std::exception_ptr> errors(n);

    auto work = [&](std::size_t i) {
        try {
            slots[i].emplace(fn(i));
        } catch (...) {
            errors[i] = std::current_exception();
        }
    };

    const std::size_t workers =
        parallel ? std::min<std::size_t>(n, std::max(1u, std::thread::hardware_concurrency())) : 1;
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            work(i);
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < n; i = next++) {
                    work(i);
                }
            });
        }
    }

    for (const auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
    std::vector<Result> out;
    out.reserve(n);
    for (auto& s : slots) {
        out.push_back(std::move(*s));
    }
    return out;
}

} // namespace uavcomm

#endif
