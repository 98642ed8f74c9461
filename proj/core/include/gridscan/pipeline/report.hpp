// SPDX-FileCopyrightText: 2026 The gridscan authors
// SPDX-License-Identifier: Apache-2.0

#ifndef GRIDSCAN_PIPELINE_REPORT_HPP
#define GRIDSCAN_PIPELINE_REPORT_HPP

#include <nlohmann/json.hpp>

#include "gridscan/pipeline/run.hpp"

namespace gridscan {

/// Run-level flag summary stored as report.json. Each segment entry carries
/// review fields (reviewed, verdict, relabels) at their unreviewed defaults so
/// that replaying an empty review log reproduces the document exactly.
nlohmann::json flag_summary(const RunManifest& manifest);

/// Serialization used for report files: two-space indent, trailing newline.
std::string dump_document(const nlohmann::json& j);

}  // namespace gridscan

#endif  // GRIDSCAN_PIPELINE_REPORT_HPP
