// SPDX-FileCopyrightText: 2026 The gridscan authors
// SPDX-License-Identifier: Apache-2.0

#ifndef GRIDSCAN_GEOMETRY_GROUND_FILTER_HPP
#define GRIDSCAN_GEOMETRY_GROUND_FILTER_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "gridscan/cloud/point_cloud.hpp"

namespace gridscan {

using Mask = std::vector<std::uint8_t>;

/// Sparse 2D (x, y) grid keyed on cells of fixed size, anchored at the
/// minimum x/y of the points it was built from.
class CellGrid {
public:
    CellGrid(std::span<const Vec3> points, double cell_size);

    struct Cell {
        std::int64_t ix = 0;
        std::int64_t iy = 0;
    };

    Cell cell_of(const Vec3& p) const;
    double cell_size() const noexcept { return cell_size_; }

    static std::uint64_t key(std::int64_t ix, std::int64_t iy) {
        return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(ix)) << 32) |
               static_cast<std::uint32_t>(iy);
    }

private:
    double cell_size_;
    double x0_ = 0.0;
    double y0_ = 0.0;
};

struct GroundFilterParams {
    double cell_size = 1.0;    ///< meters
    double z_tolerance = 0.3;  ///< meters above the 3x3-cell minimum still counted as ground
};

/// Grid-minimum ground heuristic: a point is ground iff its height above the
/// lowest point of its cell and the 8 neighboring cells is within z_tolerance.
/// Throws std::invalid_argument for non-positive parameters.
Mask filter_ground(const PointCloud& cloud, const GroundFilterParams& params = {});
Mask filter_ground(std::span<const Vec3> points, const GroundFilterParams& params = {});

}  // namespace gridscan

#endif  // GRIDSCAN_GEOMETRY_GROUND_FILTER_HPP
