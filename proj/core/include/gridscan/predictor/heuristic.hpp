// SPDX-FileCopyrightText: 2026 The gridscan authors
// SPDX-License-Identifier: Apache-2.0

#ifndef GRIDSCAN_PREDICTOR_HEURISTIC_HPP
#define GRIDSCAN_PREDICTOR_HEURISTIC_HPP

#include <cstddef>
#include <memory>
#include <span>
#include <unordered_map>
#include <vector>

#include "gridscan/cloud/point_cloud.hpp"
#include "gridscan/geometry/ground_filter.hpp"
#include "gridscan/predictor/softmax_prediction.hpp"

namespace gridscan {

struct PredictorParams {
    double ground_band = 0.5;             ///< m above ground still scored as ground
    double low_veg_band = 2.0;            ///< upper edge of low vegetation, m
    double med_veg_band = 5.0;            ///< upper edge of medium vegetation, m
    double line_height_min = 6.0;         ///< conductors hang at least this high, m
    double linearity_threshold = 0.8;
    double verticality_threshold = 0.7;
    double temperature = 1.0;

    std::size_t k_neighbors = 16;
    double neighbor_radius = 2.0;         ///< neighbors farther than this are ignored, m
    double line_max_slope = 0.5;          ///< |z| of the principal direction for a conductor
    double reference_cell = 2.0;          ///< ground reference grid cell, m
    double column_cell = 1.0;             ///< vertical occupancy column cell, m
    double slice_height = 1.0;            ///< vertical occupancy slice, m
    double vertical_run_min = 8.0;        ///< contiguous occupied height marking a structure, m
    double band_softness = 0.15;          ///< width of the soft height-band edges, m
    double noise_floor = 1.0;             ///< constant noise score
};

/// Height reference from ground points: lowest ground z over the 3x3 cell
/// neighborhood, widening the search ring when a neighborhood is empty.
class GroundReference {
public:
    GroundReference(std::span<const Vec3> points, std::span<const std::uint8_t> ground_mask, double cell_size);

    double height_above(const Vec3& p) const;

private:
    CellGrid grid_;
    std::unordered_map<std::uint64_t, double> cell_min_;
    double fallback_ = 0.0;
    int max_ring_ = 8;
};

struct PointFeatures {
    double height = 0.0;       ///< above local ground
    double linearity = 0.0;    ///< (l1 - l2) / l1 of the neighborhood covariance
    double verticality = 0.0;  ///< |z| of the principal direction
    double principal_z = 0.0;
    double vertical_run = 0.0; ///< contiguous occupied column height through the point, m
    bool degenerate = true;    ///< fewer than 3 neighbors within the radius
};

std::vector<PointFeatures> compute_features(const PointCloud& cloud, std::span<const std::uint8_t> ground_mask,
                                            const GroundReference& reference, const PredictorParams& params);

/// Raw per-class scores (row-major, schema order) before the softmax.
std::vector<double> heuristic_scores(std::span<const PointFeatures> features, std::span<const std::uint8_t> ground_mask,
                                     const ClassSchema& schema, const PredictorParams& params);

/// Geometric baseline predictor; schema must be ts40k- or tsrgb-shaped
/// (std::invalid_argument otherwise). Deterministic.
SoftmaxPrediction predict_heuristic(const PointCloud& cloud, std::span<const std::uint8_t> ground_mask,
                                    std::shared_ptr<const ClassSchema> schema, const PredictorParams& params = {});
SoftmaxPrediction predict_heuristic(const PointCloud& cloud, std::span<const std::uint8_t> ground_mask,
                                    const GroundReference& reference, std::shared_ptr<const ClassSchema> schema,
                                    const PredictorParams& params = {});

}  // namespace gridscan

#endif  // GRIDSCAN_PREDICTOR_HEURISTIC_HPP
