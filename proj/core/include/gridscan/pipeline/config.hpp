// SPDX-FileCopyrightText: 2026 The gridscan authors
// SPDX-License-Identifier: Apache-2.0

#ifndef GRIDSCAN_PIPELINE_CONFIG_HPP
#define GRIDSCAN_PIPELINE_CONFIG_HPP

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gridscan/flagging/flagging.hpp"
#include "gridscan/geometry/ground_filter.hpp"
#include "gridscan/predictor/heuristic.hpp"

namespace gridscan {

enum class PredictorKind { heuristic, file };
enum class LabelPropagation { subsample_only, full_cloud };

/// Everything a run needs. Field names match the JSON config document.
struct RunConfig {
    std::vector<std::filesystem::path> input;  ///< concatenated in order
    std::string input_format = "auto";         ///< auto | xyz | ply | cache
    std::string schema = "ts40k";
    double segment_length = 50.0;
    std::size_t min_segment_points = 1000;
    std::size_t fps_budget = 100000;
    std::size_t fps_seed = 0;  ///< index of the first pick within each segment

    PredictorKind predictor = PredictorKind::heuristic;
    PredictorParams heuristic;
    /// File predictor: path with `{id}` replaced by the segment id. The file holds
    /// one row per sampled point, in ascending source-index order.
    std::string prediction_pattern;

    FlagPolicy flag_policy;
    bool remove_ground = false;
    GroundFilterParams ground_filter;
    bool estimate_normals = false;
    std::size_t normal_k = 16;
    LabelPropagation label_propagation = LabelPropagation::subsample_only;

    std::filesystem::path out;
    std::size_t parallelism = 1;  ///< 0 selects the hardware thread count

    /// Throws std::invalid_argument on out-of-range values.
    void validate() const;

    /// Full snapshot. `include_out` is false for the manifest copy so that a
    /// run directory does not depend on where it was written.
    nlohmann::json to_json(bool include_out = true) const;
    /// Unknown keys are rejected. Relative paths resolve against `base_dir`.
    static RunConfig from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
};

RunConfig load_run_config(const std::filesystem::path& path);

nlohmann::json to_json(const PredictorParams& params);
PredictorParams predictor_params_from_json(const nlohmann::json& j);

std::string_view to_string(LabelPropagation mode);
std::filesystem::path prediction_path(const std::string& pattern, std::size_t segment_id);

}  // namespace gridscan

#endif  // GRIDSCAN_PIPELINE_CONFIG_HPP
