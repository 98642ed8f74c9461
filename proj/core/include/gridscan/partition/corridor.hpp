// SPDX-FileCopyrightText: 2026 The gridscan authors
// SPDX-License-Identifier: Apache-2.0

#ifndef GRIDSCAN_PARTITION_CORRIDOR_HPP
#define GRIDSCAN_PARTITION_CORRIDOR_HPP

#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "gridscan/cloud/point_cloud.hpp"

namespace gridscan {

struct CorridorAxis {
    Vec3 origin = Vec3::Zero();                        ///< cloud centroid
    Eigen::Vector2d direction = Eigen::Vector2d::UnitX(); ///< unit, x >= 0 (tie: y >= 0)
    bool degenerate = false;                           ///< isotropic spread; direction defaulted

    double project(const Vec3& p) const {
        return (p.x() - origin.x()) * direction.x() + (p.y() - origin.y()) * direction.y();
    }
};

/// Principal horizontal direction of the (x, y) scatter.
/// Throws std::invalid_argument for fewer than two points.
CorridorAxis estimate_corridor_axis(const PointCloud& cloud);

struct Segment {
    std::size_t segment_id = 0;
    std::vector<std::size_t> point_indices;  ///< ascending, into the source cloud
    double t_start = 0.0;                    ///< along-axis interval, meters
    double t_end = 0.0;
    Aabb bounds;
};

struct PartitionParams {
    double segment_length = 50.0;
    std::size_t min_points = 1000;
};

/// Half-open bins of `segment_length` along the axis starting at the minimum
/// projection. Bins holding fewer than `min_points` are merged into the lower
/// neighbor; an undersized first bin merges upward. Empty clouds give no segments.
std::vector<Segment> partition_corridor(const PointCloud& cloud, const CorridorAxis& axis,
                                        const PartitionParams& params = {});

}  // namespace gridscan

#endif  // GRIDSCAN_PARTITION_CORRIDOR_HPP
