// SPDX-FileCopyrightText: 2026 The gridscan authors
// SPDX-License-Identifier: Apache-2.0

#include "gridscan/geometry/fps.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace gridscan {

SampleResult farthest_point_sample(std::span<const Vec3> points, std::size_t k, std::size_t seed) {
    if (k == 0) throw std::invalid_argument("farthest_point_sample: k must be at least 1");
    const std::size_t n = points.size();
    SampleResult result;
    if (n == 0) return result;
    if (seed >= n) throw std::invalid_argument("farthest_point_sample: seed index out of range");
    if (n <= k) {
        result.indices.resize(n);
        std::iota(result.indices.begin(), result.indices.end(), std::size_t{0});
        return result;
    }

    // Structure-of-arrays copy keeps the inner loop streaming through memory.
    std::vector<double> xs(n), ys(n), zs(n);
    for (std::size_t i = 0; i < n; ++i) {
        xs[i] = points[i].x();
        ys[i] = points[i].y();
        zs[i] = points[i].z();
    }
    // Squared distance to the selected set; selected points hold -1 so they never win again.
    std::vector<double> cache(n, std::numeric_limits<double>::infinity());

    result.indices.reserve(k);
    std::size_t current = seed;
    double farthest = 0.0;
    for (std::size_t step = 0; step < k; ++step) {
        result.indices.push_back(current);
        cache[current] = -1.0;
        const double cx = xs[current];
        const double cy = ys[current];
        const double cz = zs[current];
        double best = -1.0;
        std::size_t best_index = 0;
        double* __restrict d = cache.data();
        const double* __restrict px = xs.data();
        const double* __restrict py = ys.data();
        const double* __restrict pz = zs.data();
        for (std::size_t i = 0; i < n; ++i) {
            const double dx = px[i] - cx;
            const double dy = py[i] - cy;
            const double dz = pz[i] - cz;
            const double dist = dx * dx + dy * dy + dz * dz;
            const double v = dist < d[i] ? dist : d[i];
            d[i] = v;
            if (v > best) {
                best = v;
                best_index = i;
            }
        }
        current = best_index;
        farthest = best;
    }
    result.coverage_radius = std::sqrt(std::max(0.0, farthest));
    return result;
}

SampleResult farthest_point_sample(const PointCloud& cloud, std::size_t k, std::size_t seed) {
    return farthest_point_sample(cloud.positions(), k, seed);
}

}  // namespace gridscan
