// SPDX-FileCopyrightText: 2026 The gridscan authors
// SPDX-License-Identifier: Apache-2.0

#ifndef GRIDSCAN_METRICS_METRICS_HPP
#define GRIDSCAN_METRICS_METRICS_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gridscan/cloud/class_schema.hpp"

namespace gridscan {

/// C x C counts; rows are ground truth, columns are predictions.
class ConfusionMatrix {
public:
    explicit ConfusionMatrix(std::shared_ptr<const ClassSchema> schema);

    /// Adds one count per point, skipping points whose truth label is in `ignore`.
    /// Throws std::invalid_argument on length mismatch, DataError on labels outside the schema.
    void accumulate(std::span<const ClassId> truth, std::span<const ClassId> predicted,
                    const std::set<ClassId>& ignore = {});
    ConfusionMatrix& merge(const ConfusionMatrix& other);

    std::size_t classes() const noexcept { return classes_; }
    const std::shared_ptr<const ClassSchema>& schema() const noexcept { return schema_; }
    std::uint64_t at(ClassId truth, ClassId predicted) const { return counts_[truth * classes_ + predicted]; }
    std::uint64_t total() const noexcept;
    std::uint64_t true_positives(ClassId c) const { return at(c, c); }
    std::uint64_t false_positives(ClassId c) const;
    std::uint64_t false_negatives(ClassId c) const;
    std::uint64_t support(ClassId c) const;  ///< ground-truth count

    friend bool operator==(const ConfusionMatrix& a, const ConfusionMatrix& b) {
        return a.classes_ == b.classes_ && a.counts_ == b.counts_;
    }

private:
    std::shared_ptr<const ClassSchema> schema_;
    std::size_t classes_;
    std::vector<std::uint64_t> counts_;
};

ConfusionMatrix accumulate(ConfusionMatrix cm, std::span<const ClassId> truth, std::span<const ClassId> predicted,
                           const std::set<ClassId>& ignore = {});
ConfusionMatrix merge(ConfusionMatrix a, const ConfusionMatrix& b);

/// TP / (TP + FP + FN); nullopt when the class never occurs in truth or prediction.
std::optional<double> iou(const ConfusionMatrix& cm, ClassId c);

/// Mean IoU over classes that are neither absent nor in `ignore` (or the
/// schema's eval_ignore). Throws std::domain_error when no class qualifies.
double miou(const ConfusionMatrix& cm, const std::set<ClassId>& ignore = {});

struct PrecisionRecall {
    double precision = 0.0;
    double recall = 0.0;
    bool precision_undefined = false;  ///< 0/0, reported as 0
    bool recall_undefined = false;
};

PrecisionRecall precision_recall(const ConfusionMatrix& cm, ClassId c);

/// (1 + b^2) P R / (b^2 P + R), or 0 when P R == 0. Throws for beta <= 0.
double f_beta(double precision, double recall, double beta);

struct ClassMetrics {
    ClassId id = 0;
    std::string name;
    bool ignored = false;
    std::optional<double> iou;
    PrecisionRecall pr;
    std::vector<double> f_beta;  ///< one per requested beta
    std::uint64_t support = 0;
};

struct ClassReport {
    std::string model;
    std::string schema;
    std::vector<double> betas;
    std::vector<ClassMetrics> classes;
    std::optional<double> miou;
    std::vector<double> macro_f_beta;  ///< per beta, over evaluated classes
    std::uint64_t total_points = 0;

    nlohmann::json to_json() const;
    /// Aligned table: model row with mIoU and per-class IoU, then one F row per beta.
    std::string to_table() const;
};

ClassReport make_report(const ConfusionMatrix& cm, std::vector<double> betas, const std::set<ClassId>& ignore = {},
                        std::string model = "model");

struct ClassHistogram {
    std::vector<std::uint64_t> counts;
    std::vector<double> fractions;
    std::uint64_t total = 0;

    bool empty() const noexcept { return total == 0; }
};

/// Throws DataError for labels outside the schema.
ClassHistogram class_histogram(std::span<const ClassId> labels, const ClassSchema& schema);

struct ClassWeights {
    std::vector<double> weights;        ///< 0 for absent classes
    std::vector<std::uint8_t> absent;
};

/// w_c = total / (present_classes * n_c). Throws std::invalid_argument on an all-zero histogram.
ClassWeights inverse_frequency_weights(const ClassHistogram& histogram);

}  // namespace gridscan

#endif  // GRIDSCAN_METRICS_METRICS_HPP
