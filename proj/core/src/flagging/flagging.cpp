// SPDX-FileCopyrightText: 2026 The gridscan authors
// SPDX-License-Identifier: Apache-2.0

#include "gridscan/flagging/flagging.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "gridscan/geometry/kd_tree.hpp"

namespace gridscan {

void FlagPolicy::validate() const {
    if (!(margin_threshold > 0.0 && margin_threshold < 1.0)) throw std::invalid_argument("margin_threshold must be in (0, 1)");
    if (!(entropy_threshold > 0.0 && entropy_threshold < 1.0)) throw std::invalid_argument("entropy_threshold must be in (0, 1)");
    if (!(cluster_radius > 0.0)) throw std::invalid_argument("cluster_radius must be positive");
    if (cluster_min_points < 1) throw std::invalid_argument("cluster_min_points must be at least 1");
    if (!(segment_undecided_fraction > 0.0 && segment_undecided_fraction < 1.0)) {
        throw std::invalid_argument("segment_undecided_fraction must be in (0, 1)");
    }
}

double margin(std::span<const float> row) {
    if (row.size() <= 1) return 1.0;
    float top = -1.0f;
    float second = -1.0f;
    for (float v : row) {
        if (v > top) {
            second = top;
            top = v;
        } else if (v > second) {
            second = v;
        }
    }
    return static_cast<double>(top) - static_cast<double>(second);
}

double normalized_entropy(std::span<const float> row) {
    if (row.size() <= 1) return 0.0;
    double h = 0.0;
    for (float v : row) {
        if (v > 0.0f) h -= static_cast<double>(v) * std::log(static_cast<double>(v));
    }
    return std::clamp(h / std::log(static_cast<double>(row.size())), 0.0, 1.0);
}

Mask mark_undecided(const SoftmaxPrediction& prediction, const FlagPolicy& policy) {
    Mask mask(prediction.size(), 0);
    for (std::size_t i = 0; i < prediction.size(); ++i) {
        const auto row = prediction.row(i);
        const bool undecided = policy.measure == UncertaintyMeasure::margin
                                   ? margin(row) < policy.margin_threshold
                                   : normalized_entropy(row) > policy.entropy_threshold;
        mask[i] = undecided ? 1 : 0;
    }
    return mask;
}

ClusterResult cluster_undecided(std::span<const Vec3> points, std::span<const std::uint8_t> mask,
                                const FlagPolicy& policy) {
    if (!(policy.cluster_radius > 0.0)) throw std::invalid_argument("cluster_radius must be positive");
    if (policy.cluster_min_points < 1) throw std::invalid_argument("cluster_min_points must be at least 1");
    if (mask.size() != points.size()) throw std::invalid_argument("mask length does not match points");

    std::vector<std::size_t> members;  // local -> point index, ascending
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (mask[i]) members.push_back(i);
    }
    ClusterResult result;
    if (members.empty()) return result;

    std::vector<Vec3> local;
    local.reserve(members.size());
    for (auto i : members) local.push_back(points[i]);
    const KdTree index(local);
    const std::size_t m = local.size();

    // Neighborhoods are recomputed per pass instead of stored: dense
    // undecided regions would otherwise hold O(m * density) indices.
    std::vector<std::size_t> nbrs;
    std::vector<std::uint8_t> core(m, 0);
    for (std::size_t i = 0; i < m; ++i) {
        index.radius_indices(local[i], policy.cluster_radius, nbrs);
        core[i] = nbrs.size() >= policy.cluster_min_points ? 1 : 0;
    }

    // Connected components over core points.
    constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> component(m, kNone);
    std::size_t components = 0;
    std::vector<std::size_t> stack;
    for (std::size_t i = 0; i < m; ++i) {
        if (!core[i] || component[i] != kNone) continue;
        component[i] = components;
        stack.assign(1, i);
        while (!stack.empty()) {
            const auto p = stack.back();
            stack.pop_back();
            index.radius_indices(local[p], policy.cluster_radius, nbrs);
            for (auto q : nbrs) {
                if (core[q] && component[q] == kNone) {
                    component[q] = components;
                    stack.push_back(q);
                }
            }
        }
        ++components;
    }

    // Border points: nearest core neighbor wins.
    for (std::size_t i = 0; i < m; ++i) {
        if (core[i]) continue;
        double best = std::numeric_limits<double>::infinity();
        std::size_t owner = kNone;
        index.radius_indices(local[i], policy.cluster_radius, nbrs);
        for (auto q : nbrs) {
            if (!core[q]) continue;
            const double d = (local[q] - local[i]).squaredNorm();
            if (d < best) {
                best = d;
                owner = q;
            }
        }
        if (owner != kNone) component[i] = component[owner];
    }

    std::vector<Cluster> clusters(components);
    for (std::size_t i = 0; i < m; ++i) {
        if (component[i] == kNone) {
            result.unclustered.push_back(members[i]);
        } else {
            clusters[component[i]].members.push_back(members[i]);
        }
    }
    // Components were discovered in core-index order; renumber by lowest member.
    std::sort(clusters.begin(), clusters.end(),
              [](const Cluster& a, const Cluster& b) { return a.members.front() < b.members.front(); });
    for (std::size_t c = 0; c < clusters.size(); ++c) {
        auto& cl = clusters[c];
        cl.cluster_id = c;
        cl.member_count = cl.members.size();
        const Vec3 origin = points[cl.members.front()];
        Vec3 acc = Vec3::Zero();
        cl.bounds.min = cl.bounds.max = origin;
        for (auto i : cl.members) {
            acc += points[i] - origin;
            cl.bounds.min = cl.bounds.min.cwiseMin(points[i]);
            cl.bounds.max = cl.bounds.max.cwiseMax(points[i]);
        }
        cl.centroid = origin + acc / static_cast<double>(cl.members.size());
    }
    result.clusters = std::move(clusters);
    return result;
}

bool flag_decision(std::size_t undecided_count, double undecided_fraction, const FlagPolicy& policy) {
    return undecided_count >= policy.segment_undecided_min || undecided_fraction >= policy.segment_undecided_fraction;
}

FlagReport flag_segment(std::size_t segment_id, std::span<const Vec3> points, const SoftmaxPrediction& prediction,
                        const FlagPolicy& policy) {
    if (points.size() != prediction.size()) {
        throw std::invalid_argument("flag_segment: " + std::to_string(prediction.size()) + " predictions for " +
                                    std::to_string(points.size()) + " points");
    }
    FlagReport report;
    report.segment_id = segment_id;
    report.point_count = points.size();
    report.per_class_undecided.assign(prediction.classes(), 0);

    const Mask mask = mark_undecided(prediction, policy);
    for (std::size_t i = 0; i < mask.size(); ++i) {
        if (!mask[i]) continue;
        ++report.undecided_count;
        ++report.per_class_undecided[argmax(prediction.row(i))];
    }
    report.undecided_fraction =
        points.empty() ? 0.0 : static_cast<double>(report.undecided_count) / static_cast<double>(points.size());
    auto clusters = cluster_undecided(points, mask, policy);
    report.clusters = std::move(clusters.clusters);
    report.unclustered_count = clusters.unclustered.size();
    report.flagged = flag_decision(report.undecided_count, report.undecided_fraction, policy);
    return report;
}

namespace {

nlohmann::json vec_json(const Vec3& v) { return nlohmann::json::array({v.x(), v.y(), v.z()}); }

Vec3 vec_from(const nlohmann::json& j) { return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()}; }

}  // namespace

nlohmann::json FlagReport::to_json() const {
    nlohmann::json cl = nlohmann::json::array();
    for (const auto& c : clusters) {
        cl.push_back({{"cluster_id", c.cluster_id},
                      {"centroid", vec_json(c.centroid)},
                      {"bounds", {{"min", vec_json(c.bounds.min)}, {"max", vec_json(c.bounds.max)}}},
                      {"member_count", c.member_count}});
    }
    return {{"segment_id", segment_id},
            {"point_count", point_count},
            {"undecided_count", undecided_count},
            {"undecided_fraction", undecided_fraction},
            {"clusters", cl},
            {"unclustered_count", unclustered_count},
            {"flagged", flagged},
            {"per_class_undecided", per_class_undecided}};
}

FlagReport FlagReport::from_json(const nlohmann::json& j) {
    FlagReport r;
    r.segment_id = j.at("segment_id").get<std::size_t>();
    r.point_count = j.at("point_count").get<std::size_t>();
    r.undecided_count = j.at("undecided_count").get<std::size_t>();
    r.undecided_fraction = j.at("undecided_fraction").get<double>();
    r.unclustered_count = j.at("unclustered_count").get<std::size_t>();
    r.flagged = j.at("flagged").get<bool>();
    r.per_class_undecided = j.at("per_class_undecided").get<std::vector<std::size_t>>();
    for (const auto& c : j.at("clusters")) {
        Cluster cl;
        cl.cluster_id = c.at("cluster_id").get<std::size_t>();
        cl.centroid = vec_from(c.at("centroid"));
        cl.bounds.min = vec_from(c.at("bounds").at("min"));
        cl.bounds.max = vec_from(c.at("bounds").at("max"));
        cl.member_count = c.at("member_count").get<std::size_t>();
        r.clusters.push_back(std::move(cl));
    }
    return r;
}

nlohmann::json to_json(const FlagPolicy& p) {
    return {{"measure", p.measure == UncertaintyMeasure::margin ? "margin" : "entropy"},
            {"margin_threshold", p.margin_threshold},
            {"entropy_threshold", p.entropy_threshold},
            {"cluster_radius", p.cluster_radius},
            {"cluster_min_points", p.cluster_min_points},
            {"segment_undecided_min", p.segment_undecided_min},
            {"segment_undecided_fraction", p.segment_undecided_fraction}};
}

FlagPolicy flag_policy_from_json(const nlohmann::json& j) {
    FlagPolicy p;
    if (j.contains("measure")) {
        const auto m = j.at("measure").get<std::string>();
        if (m == "margin") {
            p.measure = UncertaintyMeasure::margin;
        } else if (m == "entropy") {
            p.measure = UncertaintyMeasure::entropy;
        } else {
            throw std::invalid_argument("unknown uncertainty measure '" + m + "'");
        }
    }
    p.margin_threshold = j.value("margin_threshold", p.margin_threshold);
    p.entropy_threshold = j.value("entropy_threshold", p.entropy_threshold);
    p.cluster_radius = j.value("cluster_radius", p.cluster_radius);
    p.cluster_min_points = j.value("cluster_min_points", p.cluster_min_points);
    p.segment_undecided_min = j.value("segment_undecided_min", p.segment_undecided_min);
    p.segment_undecided_fraction = j.value("segment_undecided_fraction", p.segment_undecided_fraction);
    p.validate();
    return p;
}

}  // namespace gridscan
