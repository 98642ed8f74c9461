// SPDX-FileCopyrightText: 2026 The gridscan authors
// SPDX-License-Identifier: Apache-2.0

#ifndef GRIDSCAN_GEOMETRY_KD_TREE_HPP
#define GRIDSCAN_GEOMETRY_KD_TREE_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "gridscan/cloud/point_cloud.hpp"

namespace gridscan {

struct Neighbor {
    std::size_t index = 0;     ///< index into the points the tree was built from
    double distance_sq = 0.0;  ///< squared Euclidean distance

    friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

/// Exact k-d tree over 3D positions. Results are ordered by (distance, index),
/// so equal-distance candidates always resolve to the lowest index.
/// Read-only after construction and safe to query from several threads.
class KdTree {
public:
    explicit KdTree(std::span<const Vec3> points, std::size_t leaf_size = 32);

    std::size_t size() const noexcept { return points_.size(); }
    bool empty() const noexcept { return points_.empty(); }
    std::size_t leaf_size() const noexcept { return leaf_size_; }

    /// Globally closest point; throws std::logic_error on an empty tree.
    Neighbor nearest(const Vec3& query) const;
    std::vector<Neighbor> knn(const Vec3& query, std::size_t k) const;
    /// k nearest restricted to distance <= radius.
    std::vector<Neighbor> knn_within(const Vec3& query, std::size_t k, double radius) const;
    /// Every point with distance <= radius (inclusive).
    std::vector<Neighbor> radius_search(const Vec3& query, double radius) const;
    /// Like radius_search but only returns indices, in ascending order.
    void radius_indices(const Vec3& query, double radius, std::vector<std::size_t>& out) const;

private:
    struct Node {
        Vec3 lo;
        Vec3 hi;
        std::uint32_t begin = 0;
        std::uint32_t end = 0;
        std::int32_t left = -1;
        std::int32_t right = -1;
    };

    std::int32_t build(std::uint32_t begin, std::uint32_t end);
    void knn_recurse(std::int32_t node, const Vec3& q, std::size_t k, double& bound,
                     std::vector<Neighbor>& heap) const;
    void radius_recurse(std::int32_t node, const Vec3& q, double r2, std::vector<Neighbor>& out) const;

    std::vector<Vec3> points_;         ///< in original order
    std::vector<std::uint32_t> order_; ///< permutation; leaves reference ranges of it
    std::vector<Vec3> packed_;         ///< points_ permuted by order_
    std::vector<Node> nodes_;
    std::size_t leaf_size_;
};

KdTree build_index(const PointCloud& cloud, std::size_t leaf_size = 32);

}  // namespace gridscan

#endif  // GRIDSCAN_GEOMETRY_KD_TREE_HPP
