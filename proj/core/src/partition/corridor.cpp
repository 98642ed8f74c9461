// SPDX-FileCopyrightText: 2026 The gridscan authors
// SPDX-License-Identifier: Apache-2.0

#include "gridscan/partition/corridor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace gridscan {

CorridorAxis estimate_corridor_axis(const PointCloud& cloud) {
    if (cloud.size() < 2) throw std::invalid_argument("estimate_corridor_axis needs at least two points");
    CorridorAxis axis;
    axis.origin = cloud.centroid();

    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (const auto& p : cloud.positions()) {
        const double dx = p.x() - axis.origin.x();
        const double dy = p.y() - axis.origin.y();
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    const double n = static_cast<double>(cloud.size());
    sxx /= n;
    syy /= n;
    sxy /= n;

    // Closed-form principal eigenvector of [[sxx, sxy], [sxy, syy]].
    const double half_diff = 0.5 * (sxx - syy);
    const double root = std::hypot(half_diff, sxy);
    const double scale = sxx + syy;
    if (!(scale > 0.0) || root <= 1e-12 * scale) {
        axis.direction = Eigen::Vector2d::UnitX();
        axis.degenerate = true;
        return axis;
    }
    const double lambda = 0.5 * (sxx + syy) + root;
    Eigen::Vector2d v = sxx >= syy ? Eigen::Vector2d(lambda - syy, sxy) : Eigen::Vector2d(sxy, lambda - sxx);
    v.normalize();
    if (v.x() < 0.0 || (v.x() == 0.0 && v.y() < 0.0)) v = -v;
    axis.direction = v;
    return axis;
}

std::vector<Segment> partition_corridor(const PointCloud& cloud, const CorridorAxis& axis,
                                        const PartitionParams& params) {
    if (!(params.segment_length > 0.0)) throw std::invalid_argument("segment_length must be positive");
    std::vector<Segment> segments;
    if (cloud.empty()) return segments;

    const auto pts = cloud.positions();
    std::size_t ref = 0;
    double t_min = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const double t = axis.project(pts[i]);
        if (t < t_min) {
            t_min = t;
            ref = i;
        }
    }
    // Offsets are measured from the minimum point itself so that bin edges
    // fall exactly where the coordinates say they do.
    const Vec3 anchor = pts[ref];
    const auto& d = axis.direction;
    std::vector<std::size_t> bin_of(pts.size());
    std::size_t bins = 1;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const double s = std::max(0.0, (pts[i].x() - anchor.x()) * d.x() + (pts[i].y() - anchor.y()) * d.y());
        bin_of[i] = static_cast<std::size_t>(std::floor(s / params.segment_length));
        bins = std::max(bins, bin_of[i] + 1);
    }
    std::vector<std::size_t> counts(bins, 0);
    for (auto b : bin_of) ++counts[b];

    // Empty bins always merge; min_points == 0 must not produce empty segments.
    const std::size_t min_points = std::max<std::size_t>(1, params.min_points);

    // Lower-neighbor merging: group[b] is the output segment of bin b.
    std::vector<std::size_t> group(bins, 0);
    std::vector<std::size_t> group_count;
    std::vector<std::pair<std::size_t, std::size_t>> group_bins;  // first/last bin
    for (std::size_t b = 0; b < bins; ++b) {
        if (group_count.empty() || counts[b] >= min_points) {
            group_count.push_back(counts[b]);
            group_bins.emplace_back(b, b);
        } else {
            group_count.back() += counts[b];
            group_bins.back().second = b;
        }
        group[b] = group_count.size() - 1;
    }
    const bool merge_first_up = group_count.size() > 1 && group_count.front() < min_points;
    if (merge_first_up) {
        for (auto& g : group) g = g == 0 ? 0 : g - 1;
        group_bins[1].first = group_bins[0].first;
        group_bins.erase(group_bins.begin());
        group_count[1] += group_count[0];
        group_count.erase(group_count.begin());
    }

    segments.resize(group_count.size());
    for (std::size_t g = 0; g < segments.size(); ++g) {
        auto& s = segments[g];
        s.segment_id = g;
        s.point_indices.reserve(group_count[g]);
        s.t_start = t_min + static_cast<double>(group_bins[g].first) * params.segment_length;
        s.t_end = t_min + static_cast<double>(group_bins[g].second + 1) * params.segment_length;
    }
    for (std::size_t i = 0; i < pts.size(); ++i) {
        auto& s = segments[group[bin_of[i]]];
        if (s.point_indices.empty()) {
            s.bounds.min = s.bounds.max = pts[i];
        } else {
            s.bounds.min = s.bounds.min.cwiseMin(pts[i]);
            s.bounds.max = s.bounds.max.cwiseMax(pts[i]);
        }
        s.point_indices.push_back(i);
    }
    return segments;
}

}  // namespace gridscan
