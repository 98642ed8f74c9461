// SPDX-FileCopyrightText: 2026 The gridscan authors
// SPDX-License-Identifier: Apache-2.0

#ifndef GRIDSCAN_PREDICTOR_SOFTMAX_PREDICTION_HPP
#define GRIDSCAN_PREDICTOR_SOFTMAX_PREDICTION_HPP

#include <cstddef>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gridscan/cloud/point_cloud.hpp"

namespace gridscan {

/// Row-major point_count x C matrix of per-point class probabilities.
/// Every row lies in [0, 1] and sums to 1 within 1e-4.
class SoftmaxPrediction {
public:
    static constexpr double kRowTolerance = 1e-4;

    SoftmaxPrediction() = default;
    SoftmaxPrediction(std::vector<float> probs, std::shared_ptr<const ClassSchema> schema);

    std::size_t size() const noexcept { return classes_ == 0 ? 0 : probs_.size() / classes_; }
    std::size_t classes() const noexcept { return classes_; }
    std::span<const float> row(std::size_t i) const { return {probs_.data() + i * classes_, classes_}; }
    std::span<const float> data() const noexcept { return probs_; }
    const std::shared_ptr<const ClassSchema>& schema() const noexcept { return schema_; }

    /// Rows at `indices`, in order.
    SoftmaxPrediction subset(std::span<const std::size_t> indices) const;

    friend bool operator==(const SoftmaxPrediction& a, const SoftmaxPrediction& b);

private:
    std::vector<float> probs_;
    std::size_t classes_ = 0;
    std::shared_ptr<const ClassSchema> schema_;
};

/// Index of the largest probability; ties resolve to the lowest class id.
ClassId argmax(std::span<const float> row);
std::vector<ClassId> argmax_labels(const SoftmaxPrediction& prediction);

/// Numerically stable softmax of `scores / temperature`, row by row.
SoftmaxPrediction softmax_rows(std::span<const double> scores, double temperature,
                               std::shared_ptr<const ClassSchema> schema);

// Prediction exchange format:
//   {"n":N,"c":C,"classes":[names...]}\n followed by N*C float32 little-endian, row-major.
struct PredictionHeader {
    std::size_t n = 0;
    std::size_t c = 0;
    std::vector<std::string> classes;
    std::size_t payload_offset = 0;
};

PredictionHeader read_prediction_header(std::string_view bytes);
std::string encode_predictions(const SoftmaxPrediction& prediction);

/// Validates against the expected point count and schema. Rows off from 1 by
/// more than 1e-4 but at most 1e-3 are renormalized; larger deviations,
/// negative or non-finite entries are data errors.
SoftmaxPrediction decode_predictions(std::string_view bytes, std::size_t expected_points,
                                     std::shared_ptr<const ClassSchema> schema);

SoftmaxPrediction load_predictions(const std::filesystem::path& path, const PointCloud& cloud,
                                   std::shared_ptr<const ClassSchema> schema);
void write_predictions(const std::filesystem::path& path, const SoftmaxPrediction& prediction);

/// Whitespace-separated text matrix (one row per point) to a prediction; the
/// helper behind exporting externally computed probabilities.
SoftmaxPrediction parse_probability_text(std::string_view text, std::shared_ptr<const ClassSchema> schema);

}  // namespace gridscan

#endif  // GRIDSCAN_PREDICTOR_SOFTMAX_PREDICTION_HPP
