#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <span>
#include <thread>
#include <vector>

namespace lmc {

struct MCConfig
{
    std::size_t n_paths = 1000;
    std::uint64_t base_seed = 1;
    std::size_t grid_size = 64;
    // 0 means std::thread::hardware_concurrency().
    unsigned threads = 0;
};

/// Pairwise (cascade) summation; the result depends only on the order of
/// the input, never on scheduling.
double pairwise_sum(std::span<double const> values);

struct SampleStats
{
    std::size_t n = 0;
    double mean = 0.0;
    double variance = 0.0;
    double std_error = 0.0;
};

SampleStats sample_stats(std::span<double const> values);

unsigned resolve_threads(unsigned requested);

/// out[i] = fn(i) for i < n, evaluated on a pool of worker threads. Each
/// index is written by exactly one worker, so the output is deterministic.
template<class Fn>
auto parallel_map(std::size_t n, unsigned threads, Fn&& fn) -> std::vector<decltype(fn(std::size_t{}))>
{
    using T = decltype(fn(std::size_t{}));
    std::vector<T> out(n);
    unsigned const workers = std::min<std::size_t>(resolve_threads(threads), std::max<std::size_t>(n, 1));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            out[i] = fn(i);
        }
        return out;
    }
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = w; i < n; i += workers) {
                    out[i] = fn(i);
                }
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) {
                    failure = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
    return out;
}

} // namespace lmc
