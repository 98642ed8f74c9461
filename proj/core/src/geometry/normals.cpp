// SPDX-FileCopyrightText: 2026 The gridscan authors
// SPDX-License-Identifier: Apache-2.0

#include "gridscan/geometry/normals.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace gridscan {

namespace {

constexpr double kOrientationEps = 1e-12;

}  // namespace

std::vector<Normal3> NormalEstimate::as_float() const {
    std::vector<Normal3> out;
    out.reserve(normals.size());
    for (const auto& n : normals) {
        Normal3 f = n.cast<float>();
        // Float rounding can leave the norm a few ulps off; rescale in double.
        out.push_back((f.cast<double>() / f.cast<double>().norm()).cast<float>());
    }
    return out;
}

LocalShape local_shape(std::span<const Vec3> points, std::span<const std::size_t> indices) {
    LocalShape shape;
    if (indices.empty()) return shape;
    const Vec3 origin = points[indices.front()];
    Vec3 mean = Vec3::Zero();
    for (auto i : indices) mean += points[i] - origin;
    mean /= static_cast<double>(indices.size());
    Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
    for (auto i : indices) {
        const Vec3 d = (points[i] - origin) - mean;
        cov.noalias() += d * d.transpose();
    }
    cov /= static_cast<double>(indices.size());
    if (cov.trace() <= 0.0) return shape;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(cov);
    shape.eigenvalues = solver.eigenvalues().cwiseMax(0.0);
    shape.eigenvectors = solver.eigenvectors();
    shape.degenerate = false;
    return shape;
}

Vec3 canonical_orientation(const Vec3& n) {
    bool flip = false;
    if (std::abs(n.z()) > kOrientationEps) {
        flip = n.z() < 0.0;
    } else if (std::abs(n.y()) > kOrientationEps) {
        flip = n.y() < 0.0;
    } else {
        flip = n.x() < 0.0;
    }
    return flip ? Vec3(-n) : n;
}

NormalEstimate estimate_normals(const PointCloud& cloud, std::size_t k_neighbors) {
    return estimate_normals(cloud, build_index(cloud), k_neighbors);
}

NormalEstimate estimate_normals(const PointCloud& cloud, const KdTree& index, std::size_t k_neighbors) {
    if (cloud.size() < 3) throw std::invalid_argument("estimate_normals needs at least 3 points");
    if (k_neighbors < 3) throw std::invalid_argument("estimate_normals needs k_neighbors >= 3");
    if (index.size() != cloud.size()) throw std::invalid_argument("index was not built from this cloud");

    NormalEstimate out;
    out.normals.resize(cloud.size());
    out.degenerate.assign(cloud.size(), 0);
    const auto pts = cloud.positions();
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        const auto nbrs = index.knn(pts[i], k_neighbors);
        idx.clear();
        for (const auto& nb : nbrs) idx.push_back(nb.index);
        const auto shape = local_shape(pts, idx);
        if (shape.degenerate) {
            out.normals[i] = Vec3::UnitZ();
            out.degenerate[i] = 1;
            ++out.degenerate_count;
            continue;
        }
        out.normals[i] = canonical_orientation(shape.eigenvectors.col(0).normalized());
    }
    return out;
}

}  // namespace gridscan
