// SPDX-FileCopyrightText: 2026 The gridscan authors
// SPDX-License-Identifier: Apache-2.0

#include "gridscan/predictor/heuristic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

#include "gridscan/geometry/kd_tree.hpp"
#include "gridscan/geometry/normals.hpp"

namespace gridscan {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

/// Smooth indicator of lo < h <= hi.
double band(double h, double lo, double hi, double softness) {
    return sigmoid((h - lo) / softness) * sigmoid((hi - h) / softness);
}

struct ClassSlots {
    std::size_t noise, tower, line;
    std::optional<std::size_t> ground, low_veg, med_veg, vegetation;
};

ClassSlots resolve_slots(const ClassSchema& schema) {
    auto need = [&](const char* name) -> std::size_t {
        if (auto id = schema.find(name)) return *id;
        throw std::invalid_argument(std::string("heuristic predictor: schema ") + schema.name() + " lacks class '" +
                                    name + "'");
    };
    ClassSlots s{need("noise"), need("tower"), need("power_line"), {}, {}, {}, {}};
    if (schema.find("ground") && schema.find("low_vegetation") && schema.find("medium_vegetation")) {
        s.ground = *schema.find("ground");
        s.low_veg = *schema.find("low_vegetation");
        s.med_veg = *schema.find("medium_vegetation");
    } else if (schema.find("vegetation")) {
        s.vegetation = *schema.find("vegetation");
    } else {
        throw std::invalid_argument("heuristic predictor: schema " + schema.name() +
                                    " has neither ground/low/medium vegetation nor vegetation classes");
    }
    return s;
}

constexpr double kStrong = 6.0;

}  // namespace

GroundReference::GroundReference(std::span<const Vec3> points, std::span<const std::uint8_t> ground_mask,
                                 double cell_size)
    : grid_(points, cell_size) {
    if (ground_mask.size() != points.size()) throw std::invalid_argument("ground mask length mismatch");
    const bool any_ground = std::any_of(ground_mask.begin(), ground_mask.end(), [](auto m) { return m != 0; });
    fallback_ = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (any_ground && !ground_mask[i]) continue;
        const auto c = grid_.cell_of(points[i]);
        auto [it, inserted] = cell_min_.try_emplace(CellGrid::key(c.ix, c.iy), points[i].z());
        if (!inserted) it->second = std::min(it->second, points[i].z());
        fallback_ = std::min(fallback_, points[i].z());
    }
    if (!std::isfinite(fallback_)) fallback_ = 0.0;
}

double GroundReference::height_above(const Vec3& p) const {
    const auto c = grid_.cell_of(p);
    double ref = std::numeric_limits<double>::infinity();
    for (int ring = 1; ring <= max_ring_ && !std::isfinite(ref); ++ring) {
        for (int dx = -ring; dx <= ring; ++dx) {
            for (int dy = -ring; dy <= ring; ++dy) {
                if (ring > 1 && std::abs(dx) != ring && std::abs(dy) != ring) continue;
                if (auto it = cell_min_.find(CellGrid::key(c.ix + dx, c.iy + dy)); it != cell_min_.end()) {
                    ref = std::min(ref, it->second);
                }
            }
        }
    }
    return p.z() - (std::isfinite(ref) ? ref : fallback_);
}

std::vector<PointFeatures> compute_features(const PointCloud& cloud, std::span<const std::uint8_t> ground_mask,
                                            const GroundReference& reference, const PredictorParams& params) {
    if (ground_mask.size() != cloud.size()) throw std::invalid_argument("ground mask length mismatch");
    const auto pts = cloud.positions();
    std::vector<PointFeatures> features(pts.size());
    if (pts.empty()) return features;

    for (std::size_t i = 0; i < pts.size(); ++i) features[i].height = reference.height_above(pts[i]);

    const KdTree index(pts);
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const auto nbrs = index.knn_within(pts[i], params.k_neighbors, params.neighbor_radius);
        if (nbrs.size() < 3) continue;
        idx.clear();
        for (const auto& nb : nbrs) idx.push_back(nb.index);
        const auto shape = local_shape(pts, idx);
        if (shape.degenerate) continue;
        const double l1 = shape.eigenvalues[2];
        const double l2 = shape.eigenvalues[1];
        auto& f = features[i];
        f.degenerate = false;
        f.linearity = l1 > 0.0 ? (l1 - l2) / l1 : 0.0;
        f.principal_z = std::abs(shape.eigenvectors.col(2).z());
        f.verticality = f.principal_z;
    }

    // Column occupancy of non-ground points, one bit per height slice.
    const CellGrid columns(pts, params.column_cell);
    std::unordered_map<std::uint64_t, std::uint64_t> occupancy;
    std::vector<int> slice(pts.size(), -1);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (ground_mask[i]) continue;
        const double h = std::max(0.0, features[i].height);
        const auto s = static_cast<long>(std::floor(h / params.slice_height));
        if (s >= 64) continue;
        slice[i] = static_cast<int>(s);
        const auto c = columns.cell_of(pts[i]);
        occupancy[CellGrid::key(c.ix, c.iy)] |= std::uint64_t{1} << s;
    }
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (slice[i] < 0) continue;
        const auto c = columns.cell_of(pts[i]);
        std::uint64_t bits = 0;
        for (int dx = -1; dx <= 1; ++dx) {
            for (int dy = -1; dy <= 1; ++dy) {
                if (auto it = occupancy.find(CellGrid::key(c.ix + dx, c.iy + dy)); it != occupancy.end()) {
                    bits |= it->second;
                }
            }
        }
        int lo = slice[i];
        int hi = slice[i];
        while (lo > 0 && (bits >> (lo - 1) & 1u)) --lo;
        while (hi < 63 && (bits >> (hi + 1) & 1u)) ++hi;
        features[i].vertical_run = (hi - lo + 1) * params.slice_height;
    }
    return features;
}

std::vector<double> heuristic_scores(std::span<const PointFeatures> features, std::span<const std::uint8_t> ground_mask,
                                     const ClassSchema& schema, const PredictorParams& params) {
    const auto slots = resolve_slots(schema);
    const std::size_t c = schema.size();
    const double w = params.band_softness;
    std::vector<double> scores(features.size() * c, 0.0);
    for (std::size_t i = 0; i < features.size(); ++i) {
        const auto& f = features[i];
        const double on_ground = ground_mask[i] ? 1.0 : 0.0;
        double* s = scores.data() + i * c;

        const double structure = f.vertical_run >= params.vertical_run_min ? 1.0 : 0.0;
        const double upright = f.degenerate ? 0.0 : sigmoid((f.verticality - params.verticality_threshold) / 0.05);
        const double linear = f.degenerate ? 0.0 : sigmoid((f.linearity - params.linearity_threshold) / 0.05);
        const double level = f.degenerate ? 0.0 : sigmoid((params.line_max_slope - f.principal_z) / 0.05);
        const double elevated = sigmoid((f.height - params.line_height_min) / w);
        const double lifted = sigmoid((f.height - params.ground_band) / w);

        const double tower = kStrong * structure * lifted * (0.5 + 0.5 * upright);
        const double line = kStrong * elevated * linear * level * (1.0 - 0.75 * structure);
        // Upright members inside a tall structure are not vegetation.
        const double not_structure = 1.0 - structure * upright;
        const double ground = kStrong * sigmoid((params.ground_band - f.height) / w) * (0.5 + 0.5 * on_ground);
        const double low = kStrong * band(f.height, params.ground_band, params.low_veg_band, w) *
                           (1.0 - 0.5 * on_ground) * not_structure;
        const double med = kStrong * band(f.height, params.low_veg_band, params.med_veg_band, w) * not_structure;

        s[slots.noise] = params.noise_floor;
        s[slots.tower] = tower;
        s[slots.line] = line;
        if (slots.vegetation) {
            s[*slots.vegetation] = std::max({ground, low, med});
        } else {
            s[*slots.ground] = ground;
            s[*slots.low_veg] = low;
            s[*slots.med_veg] = med;
        }
    }
    return scores;
}

SoftmaxPrediction predict_heuristic(const PointCloud& cloud, std::span<const std::uint8_t> ground_mask,
                                    std::shared_ptr<const ClassSchema> schema, const PredictorParams& params) {
    const GroundReference reference(cloud.positions(), ground_mask, params.reference_cell);
    return predict_heuristic(cloud, ground_mask, reference, std::move(schema), params);
}

SoftmaxPrediction predict_heuristic(const PointCloud& cloud, std::span<const std::uint8_t> ground_mask,
                                    const GroundReference& reference, std::shared_ptr<const ClassSchema> schema,
                                    const PredictorParams& params) {
    if (!schema) throw std::invalid_argument("predict_heuristic requires a schema");
    resolve_slots(*schema);
    const auto features = compute_features(cloud, ground_mask, reference, params);
    const auto scores = heuristic_scores(features, ground_mask, *schema, params);
    return softmax_rows(scores, params.temperature, std::move(schema));
}

}  // namespace gridscan
