// SPDX-FileCopyrightText: 2026 The gridscan authors
// SPDX-License-Identifier: Apache-2.0

#ifndef GRIDSCAN_DETAIL_PARALLEL_HPP
#define GRIDSCAN_DETAIL_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace gridscan::detail {

inline std::size_t resolve_parallelism(std::size_t requested) {
    if (requested != 0) return requested;
    return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

/// Runs fn(i) for i in [0, n) on up to `degree` threads. Work items are
/// claimed in index order; fn must not throw.
template <class Fn>
void parallel_for(std::size_t n, std::size_t degree, Fn&& fn) {
    degree = std::min(resolve_parallelism(degree), n);
    if (degree <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
    };
    std::vector<std::thread> pool;
    pool.reserve(degree - 1);
    for (std::size_t t = 1; t < degree; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
}

}  // namespace gridscan::detail

#endif  // GRIDSCAN_DETAIL_PARALLEL_HPP
