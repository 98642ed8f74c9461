// SPDX-FileCopyrightText: 2026 The gridscan authors
// SPDX-License-Identifier: Apache-2.0

#ifndef GRIDSCAN_GEOMETRY_FPS_HPP
#define GRIDSCAN_GEOMETRY_FPS_HPP

#include <cstddef>
#include <span>
#include <vector>

#include "gridscan/cloud/point_cloud.hpp"

namespace gridscan {

struct SampleResult {
    std::vector<std::size_t> indices;  ///< greedy selection order
    double coverage_radius = 0.0;      ///< max distance from any point to the selected set
};

/// Greedy farthest point sampling.
///
/// Starts at `seed` and repeatedly picks the point whose distance to the
/// selected set is largest; equal distances resolve to the lowest index. When
/// the cloud has no more than `k` points every index is returned in ascending
/// order with a coverage radius of zero. Runs in O(n k) time with an O(n)
/// distance cache.
///
/// Throws std::invalid_argument for k == 0 or an out-of-range seed.
SampleResult farthest_point_sample(std::span<const Vec3> points, std::size_t k, std::size_t seed = 0);
SampleResult farthest_point_sample(const PointCloud& cloud, std::size_t k, std::size_t seed = 0);

}  // namespace gridscan

#endif  // GRIDSCAN_GEOMETRY_FPS_HPP
