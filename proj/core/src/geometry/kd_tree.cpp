// SPDX-FileCopyrightText: 2026 The gridscan authors
// SPDX-License-Identifier: Apache-2.0

#include "gridscan/geometry/kd_tree.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace gridscan {

namespace {

bool closer(const Neighbor& a, const Neighbor& b) {
    return a.distance_sq < b.distance_sq || (a.distance_sq == b.distance_sq && a.index < b.index);
}

double box_distance_sq(const Vec3& q, const Vec3& lo, const Vec3& hi) {
    double d = 0.0;
    for (int k = 0; k < 3; ++k) {
        const double excess = q[k] < lo[k] ? lo[k] - q[k] : (q[k] > hi[k] ? q[k] - hi[k] : 0.0);
        d += excess * excess;
    }
    return d;
}

double distance_sq(const Vec3& a, const Vec3& b) {
    const double dx = a.x() - b.x();
    const double dy = a.y() - b.y();
    const double dz = a.z() - b.z();
    return dx * dx + dy * dy + dz * dz;
}

}  // namespace

KdTree::KdTree(std::span<const Vec3> points, std::size_t leaf_size)
    : points_(points.begin(), points.end()), leaf_size_(std::max<std::size_t>(1, leaf_size)) {
    if (points_.size() >= std::numeric_limits<std::uint32_t>::max()) {
        throw std::length_error("k-d tree supports fewer than 2^32 points");
    }
    order_.resize(points_.size());
    std::iota(order_.begin(), order_.end(), 0u);
    if (!points_.empty()) {
        nodes_.reserve(2 * (points_.size() / leaf_size_ + 1));
        build(0, static_cast<std::uint32_t>(points_.size()));
    }
    packed_.reserve(points_.size());
    for (auto i : order_) packed_.push_back(points_[i]);
}

std::int32_t KdTree::build(std::uint32_t begin, std::uint32_t end) {
    Node node;
    node.begin = begin;
    node.end = end;
    node.lo = node.hi = points_[order_[begin]];
    for (auto i = begin; i < end; ++i) {
        node.lo = node.lo.cwiseMin(points_[order_[i]]);
        node.hi = node.hi.cwiseMax(points_[order_[i]]);
    }
    const auto id = static_cast<std::int32_t>(nodes_.size());
    nodes_.push_back(node);

    Vec3 extent = node.hi - node.lo;
    if (end - begin <= leaf_size_ || extent.maxCoeff() == 0.0) return id;

    int axis = 0;
    extent.maxCoeff(&axis);
    const auto mid = begin + (end - begin) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                     [&](std::uint32_t a, std::uint32_t b) {
                         const double va = points_[a][axis];
                         const double vb = points_[b][axis];
                         return va < vb || (va == vb && a < b);
                     });
    const auto left = build(begin, mid);
    const auto right = build(mid, end);
    nodes_[id].left = left;
    nodes_[id].right = right;
    return id;
}

Neighbor KdTree::nearest(const Vec3& query) const {
    if (empty()) throw std::logic_error("nearest() on an empty k-d tree");
    return knn(query, 1).front();
}

std::vector<Neighbor> KdTree::knn(const Vec3& query, std::size_t k) const {
    return knn_within(query, k, std::numeric_limits<double>::infinity());
}

std::vector<Neighbor> KdTree::knn_within(const Vec3& query, std::size_t k, double radius) const {
    std::vector<Neighbor> heap;
    if (empty() || k == 0) return heap;
    heap.reserve(k + 1);
    double bound = radius * radius;
    knn_recurse(0, query, k, bound, heap);
    std::sort_heap(heap.begin(), heap.end(), closer);
    return heap;
}

void KdTree::knn_recurse(std::int32_t id, const Vec3& q, std::size_t k, double& bound,
                         std::vector<Neighbor>& heap) const {
    const Node& node = nodes_[id];
    // Equal distance is kept: a lower index at the same distance may still be inside.
    if (box_distance_sq(q, node.lo, node.hi) > bound) return;
    if (node.left < 0) {
        for (auto i = node.begin; i < node.end; ++i) {
            const Neighbor cand{order_[i], distance_sq(q, packed_[i])};
            if (cand.distance_sq > bound) continue;
            if (heap.size() < k) {
                heap.push_back(cand);
                std::push_heap(heap.begin(), heap.end(), closer);
            } else if (closer(cand, heap.front())) {
                std::pop_heap(heap.begin(), heap.end(), closer);
                heap.back() = cand;
                std::push_heap(heap.begin(), heap.end(), closer);
            } else {
                continue;
            }
            if (heap.size() == k) bound = std::min(bound, heap.front().distance_sq);
        }
        return;
    }
    const Node& l = nodes_[node.left];
    const Node& r = nodes_[node.right];
    const double dl = box_distance_sq(q, l.lo, l.hi);
    const double dr = box_distance_sq(q, r.lo, r.hi);
    if (dl <= dr) {
        knn_recurse(node.left, q, k, bound, heap);
        knn_recurse(node.right, q, k, bound, heap);
    } else {
        knn_recurse(node.right, q, k, bound, heap);
        knn_recurse(node.left, q, k, bound, heap);
    }
}

std::vector<Neighbor> KdTree::radius_search(const Vec3& query, double radius) const {
    std::vector<Neighbor> out;
    if (empty() || radius < 0.0) return out;
    radius_recurse(0, query, radius * radius, out);
    std::sort(out.begin(), out.end(), closer);
    return out;
}

void KdTree::radius_indices(const Vec3& query, double radius, std::vector<std::size_t>& out) const {
    out.clear();
    if (empty() || radius < 0.0) return;
    thread_local std::vector<Neighbor> scratch;
    scratch.clear();
    radius_recurse(0, query, radius * radius, scratch);
    for (const auto& n : scratch) out.push_back(n.index);
    std::sort(out.begin(), out.end());
}

void KdTree::radius_recurse(std::int32_t id, const Vec3& q, double r2, std::vector<Neighbor>& out) const {
    const Node& node = nodes_[id];
    if (box_distance_sq(q, node.lo, node.hi) > r2) return;
    if (node.left < 0) {
        for (auto i = node.begin; i < node.end; ++i) {
            const double d = distance_sq(q, packed_[i]);
            if (d <= r2) out.push_back({order_[i], d});
        }
        return;
    }
    radius_recurse(node.left, q, r2, out);
    radius_recurse(node.right, q, r2, out);
}

KdTree build_index(const PointCloud& cloud, std::size_t leaf_size) { return KdTree(cloud.positions(), leaf_size); }

}  // namespace gridscan
