// SPDX-FileCopyrightText: 2026 The gridscan authors
// SPDX-License-Identifier: Apache-2.0

#ifndef GRIDSCAN_PIPELINE_EVALUATE_HPP
#define GRIDSCAN_PIPELINE_EVALUATE_HPP

#include <filesystem>
#include <set>
#include <span>
#include <vector>

#include "gridscan/metrics/metrics.hpp"
#include "gridscan/pipeline/run.hpp"

namespace gridscan {

/// Confusion matrix of a run's emitted labels against truth labels indexed by
/// input point. subsample_only runs are scored on the sampled points of every
/// successful segment; full_cloud runs on the reconstructed cloud. Throws
/// DataError when the truth does not align with the run's input.
ConfusionMatrix run_confusion(const std::filesystem::path& run_dir, std::span<const ClassId> truth,
                              const std::set<ClassId>& ignore = {});

/// Builds the report and writes it to evaluation.json in the run directory.
ClassReport evaluate(const std::filesystem::path& run_dir, std::span<const ClassId> truth,
                     std::vector<double> betas = {2.0}, const std::set<ClassId>& ignore = {});

/// Loads truth labels from a labeled cloud file (any supported format).
std::vector<ClassId> load_truth_labels(const std::filesystem::path& path);

}  // namespace gridscan

#endif  // GRIDSCAN_PIPELINE_EVALUATE_HPP
