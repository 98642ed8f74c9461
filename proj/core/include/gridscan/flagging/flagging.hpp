// SPDX-FileCopyrightText: 2026 The gridscan authors
// SPDX-License-Identifier: Apache-2.0

#ifndef GRIDSCAN_FLAGGING_FLAGGING_HPP
#define GRIDSCAN_FLAGGING_FLAGGING_HPP

#include <cstddef>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "gridscan/cloud/point_cloud.hpp"
#include "gridscan/geometry/ground_filter.hpp"
#include "gridscan/predictor/softmax_prediction.hpp"

namespace gridscan {

enum class UncertaintyMeasure { margin, entropy };

struct FlagPolicy {
    UncertaintyMeasure measure = UncertaintyMeasure::margin;
    double margin_threshold = 0.2;      ///< undecided iff top1 - top2 < this
    double entropy_threshold = 0.5;     ///< undecided iff normalized entropy > this (entropy measure)
    double cluster_radius = 1.0;        ///< DBSCAN epsilon, m (inclusive)
    std::size_t cluster_min_points = 5; ///< DBSCAN core size, the point itself included
    std::size_t segment_undecided_min = 100;
    double segment_undecided_fraction = 0.005;

    void validate() const;
};

/// Top-1 minus top-2 probability; 1 for single-class rows.
double margin(std::span<const float> row);
/// Shannon entropy divided by log(C), in [0, 1]; 0 for single-class rows.
double normalized_entropy(std::span<const float> row);

Mask mark_undecided(const SoftmaxPrediction& prediction, const FlagPolicy& policy);

struct Cluster {
    std::size_t cluster_id = 0;
    std::vector<std::size_t> members;  ///< ascending point indices; not serialized
    std::size_t member_count = 0;
    Vec3 centroid = Vec3::Zero();
    Aabb bounds;
};

struct ClusterResult {
    std::vector<Cluster> clusters;         ///< ordered by lowest member index
    std::vector<std::size_t> unclustered;  ///< undecided points labeled noise by DBSCAN
};

/// DBSCAN over the masked points only. A core point has at least
/// `cluster_min_points` masked points within `cluster_radius` (itself
/// included); clusters are connected components of core points, and each
/// border point joins the cluster of its nearest core neighbor (ties: lowest
/// index).
ClusterResult cluster_undecided(std::span<const Vec3> points, std::span<const std::uint8_t> mask,
                                const FlagPolicy& policy);

struct FlagReport {
    std::size_t segment_id = 0;
    std::size_t point_count = 0;
    std::size_t undecided_count = 0;
    double undecided_fraction = 0.0;
    std::vector<Cluster> clusters;
    std::size_t unclustered_count = 0;
    bool flagged = false;
    std::vector<std::size_t> per_class_undecided;  ///< histogram over argmax class ids

    nlohmann::json to_json() const;
    static FlagReport from_json(const nlohmann::json& j);
};

bool flag_decision(std::size_t undecided_count, double undecided_fraction, const FlagPolicy& policy);

/// margin -> undecided mask -> clusters -> flag decision for one segment.
/// `points` and `prediction` must have equal length (std::invalid_argument).
FlagReport flag_segment(std::size_t segment_id, std::span<const Vec3> points, const SoftmaxPrediction& prediction,
                        const FlagPolicy& policy);

nlohmann::json to_json(const FlagPolicy& policy);
FlagPolicy flag_policy_from_json(const nlohmann::json& j);

}  // namespace gridscan

#endif  // GRIDSCAN_FLAGGING_FLAGGING_HPP
