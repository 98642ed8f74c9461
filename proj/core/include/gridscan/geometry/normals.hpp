// SPDX-FileCopyrightText: 2026 The gridscan authors
// SPDX-License-Identifier: Apache-2.0

#ifndef GRIDSCAN_GEOMETRY_NORMALS_HPP
#define GRIDSCAN_GEOMETRY_NORMALS_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "gridscan/cloud/point_cloud.hpp"
#include "gridscan/geometry/kd_tree.hpp"

namespace gridscan {

struct NormalEstimate {
    std::vector<Vec3> normals;           ///< unit length, canonical orientation
    std::vector<std::uint8_t> degenerate; ///< 1 where the neighborhood collapsed to one point
    std::size_t degenerate_count = 0;

    std::vector<Normal3> as_float() const;
};

/// Local PCA of a point set. Eigenvalues ascending; eigenvectors as columns.
struct LocalShape {
    Eigen::Vector3d eigenvalues = Eigen::Vector3d::Zero();
    Eigen::Matrix3d eigenvectors = Eigen::Matrix3d::Identity();
    bool degenerate = true;
};

/// Covariance eigen-decomposition of `points[indices]`, centered on the neighborhood mean.
LocalShape local_shape(std::span<const Vec3> points, std::span<const std::size_t> indices);

/// Flips `n` so that z >= 0 (ties: y >= 0, then x >= 0). Idempotent.
Vec3 canonical_orientation(const Vec3& n);

/// Per-point normal: eigenvector of the smallest covariance eigenvalue over the
/// k nearest neighbors (the point included). Coincident neighborhoods yield
/// (0, 0, 1) with the degenerate flag set.
/// Requires at least 3 points and k_neighbors >= 3 (std::invalid_argument).
NormalEstimate estimate_normals(const PointCloud& cloud, std::size_t k_neighbors = 16);
NormalEstimate estimate_normals(const PointCloud& cloud, const KdTree& index, std::size_t k_neighbors = 16);

}  // namespace gridscan

#endif  // GRIDSCAN_GEOMETRY_NORMALS_HPP
