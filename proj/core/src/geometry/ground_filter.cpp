// SPDX-FileCopyrightText: 2026 The gridscan authors
// SPDX-License-Identifier: Apache-2.0

#include "gridscan/geometry/ground_filter.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace gridscan {

CellGrid::CellGrid(std::span<const Vec3> points, double cell_size) : cell_size_(cell_size) {
    if (!(cell_size > 0.0)) throw std::invalid_argument("cell size must be positive");
    if (points.empty()) return;
    x0_ = points.front().x();
    y0_ = points.front().y();
    for (const auto& p : points) {
        x0_ = std::min(x0_, p.x());
        y0_ = std::min(y0_, p.y());
    }
}

CellGrid::Cell CellGrid::cell_of(const Vec3& p) const {
    return {static_cast<std::int64_t>(std::floor((p.x() - x0_) / cell_size_)),
            static_cast<std::int64_t>(std::floor((p.y() - y0_) / cell_size_))};
}

Mask filter_ground(const PointCloud& cloud, const GroundFilterParams& params) {
    return filter_ground(cloud.positions(), params);
}

Mask filter_ground(std::span<const Vec3> points, const GroundFilterParams& params) {
    if (!(params.z_tolerance > 0.0)) throw std::invalid_argument("z_tolerance must be positive");
    const CellGrid grid(points, params.cell_size);
    Mask mask(points.size(), 0);
    if (points.empty()) return mask;

    std::unordered_map<std::uint64_t, double> cell_min;
    cell_min.reserve(points.size() / 4 + 1);
    std::vector<CellGrid::Cell> cells(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        cells[i] = grid.cell_of(points[i]);
        auto [it, inserted] = cell_min.try_emplace(CellGrid::key(cells[i].ix, cells[i].iy), points[i].z());
        if (!inserted) it->second = std::min(it->second, points[i].z());
    }

    std::unordered_map<std::uint64_t, double> reference;
    reference.reserve(cell_min.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto [ix, iy] = cells[i];
        auto [it, inserted] = reference.try_emplace(CellGrid::key(ix, iy), 0.0);
        if (inserted) {
            double ref = std::numeric_limits<double>::infinity();
            for (std::int64_t dx = -1; dx <= 1; ++dx) {
                for (std::int64_t dy = -1; dy <= 1; ++dy) {
                    if (auto c = cell_min.find(CellGrid::key(ix + dx, iy + dy)); c != cell_min.end()) {
                        ref = std::min(ref, c->second);
                    }
                }
            }
            it->second = ref;
        }
        mask[i] = points[i].z() - it->second <= params.z_tolerance ? 1 : 0;
    }
    return mask;
}

}  // namespace gridscan
