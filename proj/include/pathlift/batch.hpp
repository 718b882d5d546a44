#pragma once

#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "pathlift/solver.hpp"

namespace pathlift {

/// Stable per-path seed stream: mixing the manifest seed with the path
/// index keeps batch results independent of worker count and schedule.
inline std::uint64_t path_seed(std::uint64_t base, std::uint64_t index) {
    std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

struct BatchItem {
    ProblemSpec spec;
    SolverConfig config;
};

/// Solve independent paths on a bounded worker pool. Each item is
/// self-contained; output order matches input order regardless of
/// scheduling. The first exception thrown by any item is rethrown.
inline std::vector<PathSolution> solve_batch(const std::vector<BatchItem>& items, int workers = 0) {
    if (workers <= 0) workers = static_cast<int>(std::thread::hardware_concurrency());
    if (workers < 1) workers = 1;
    workers = std::min<int>(workers, static_cast<int>(items.size()));

    std::vector<PathSolution> results(items.size());
    if (items.empty()) return results;

    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;

    const auto worker = [&]() {
        while (!failed.load(std::memory_order_relaxed)) {
            const std::size_t i = next.fetch_add(1);
            if (i >= items.size()) return;
            try {
                results[i] = solve_path(items[i].spec, items[i].config);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                failed.store(true, std::memory_order_relaxed);
                return;
            }
        }
    };

    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (error) std::rethrow_exception(error);
    return results;
}

} // namespace pathlift
