// SPDX-FileCopyrightText: 2026 The gridscan authors
// SPDX-License-Identifier: Apache-2.0

#ifndef GRIDSCAN_PIPELINE_RUN_HPP
#define GRIDSCAN_PIPELINE_RUN_HPP

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gridscan/cloud/point_cloud.hpp"
#include "gridscan/partition/corridor.hpp"
#include "gridscan/pipeline/config.hpp"

namespace gridscan {

std::string_view tool_version() noexcept;

/// File names inside a run directory.
namespace run_layout {
inline constexpr const char* kManifest = "manifest.json";
inline constexpr const char* kReport = "report.json";
inline constexpr const char* kReviewedReport = "report.reviewed.json";
inline constexpr const char* kReviews = "reviews.jsonl";
inline constexpr const char* kReconstructed = "reconstructed.ply";
inline constexpr const char* kEvaluation = "evaluation.json";
inline constexpr const char* kPoints = "points.ply";
inline constexpr const char* kPredictions = "predictions.bin";
inline constexpr const char* kFlags = "flags.json";

/// "segments/<id>", relative to the run directory.
std::filesystem::path segment_dir(std::size_t segment_id);
}  // namespace run_layout

struct SegmentRecord {
    std::size_t segment_id = 0;
    std::string status = "ok";  ///< ok | error
    std::string error;
    double t_start = 0.0;
    double t_end = 0.0;
    std::size_t point_count = 0;    ///< before sampling
    std::size_t sampled_count = 0;  ///< after sampling
    double coverage_radius = 0.0;
    bool flagged = false;
    std::size_t undecided_count = 0;
    std::size_t cluster_count = 0;
    std::vector<std::size_t> member_indices;   ///< ascending input indices
    std::vector<std::size_t> sampled_indices;  ///< ascending input indices; row order of segment artifacts
    std::string points_file;                   ///< relative to the run directory; empty on error
    std::string predictions_file;
    std::string flags_file;

    bool ok() const noexcept { return status == "ok"; }
    nlohmann::json to_json() const;
    static SegmentRecord from_json(const nlohmann::json& j);
};

struct RunManifest {
    std::string tool_version;
    std::vector<std::string> input_paths;
    std::string input_sha256;
    std::size_t input_point_count = 0;
    nlohmann::json config;  ///< RunConfig snapshot without the output directory
    nlohmann::json schema;
    CorridorAxis axis;
    bool ground_removed = false;
    std::size_t ground_point_count = 0;
    std::vector<SegmentRecord> segments;
    std::string reconstruction_mode;
    std::string reconstruction_file;
    std::size_t reconstructed_count = 0;
    bool complete = true;
    /// The only nondeterministic part: wall-clock start and per-stage seconds.
    nlohmann::json timing = nlohmann::json::object();

    nlohmann::json to_json() const;
    static RunManifest from_json(const nlohmann::json& j);
    /// Config snapshot as a RunConfig writing to `out`.
    RunConfig replay_config(const std::filesystem::path& out) const;
};

RunManifest load_manifest(const std::filesystem::path& run_dir);

/// Serialized manifest with the timing field removed.
std::string manifest_fingerprint(const RunManifest& manifest);

/// Merges clouds with identical attribute sets; the first cloud's schema wins.
PointCloud concatenate(const std::vector<PointCloud>& clouds);

/// Loads the configured inputs with their schema attached when labels fit it.
PointCloud load_inputs(const RunConfig& config);

/// Executes the full inspection and writes the run directory. Failures inside
/// one segment are recorded on its record and the run continues; such a run
/// has complete == false. Errors before partitioning throw.
RunManifest run_inspection(const RunConfig& config);

struct IngestSummary {
    std::filesystem::path cache_path;
    std::size_t point_count = 0;
    std::string sha256;
    nlohmann::json to_json() const;
};

/// Parses `input` and stores it as a binary cache inside `out_dir`.
IngestSummary ingest(const std::filesystem::path& input, const std::string& format,
                     const std::filesystem::path& out_dir);

}  // namespace gridscan

#endif  // GRIDSCAN_PIPELINE_RUN_HPP
