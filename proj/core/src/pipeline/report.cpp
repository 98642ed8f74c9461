// SPDX-FileCopyrightText: 2026 The gridscan authors
// SPDX-License-Identifier: Apache-2.0

#include "gridscan/pipeline/report.hpp"

namespace gridscan {

nlohmann::json flag_summary(const RunManifest& manifest) {
    nlohmann::json segments = nlohmann::json::array();
    std::size_t flagged = 0;
    for (const auto& r : manifest.segments) {
        nlohmann::json s = {{"segment_id", r.segment_id},
                            {"status", r.status},
                            {"point_count", r.point_count},
                            {"sampled_count", r.sampled_count},
                            {"undecided_count", r.undecided_count},
                            {"undecided_fraction",
                             r.sampled_count ? static_cast<double>(r.undecided_count) /
                                                   static_cast<double>(r.sampled_count)
                                             : 0.0},
                            {"cluster_count", r.cluster_count},
                            {"flagged", r.flagged},
                            {"reviewed", false},
                            {"verdict", nullptr},
                            {"relabels", nlohmann::json::array()}};
        if (!r.ok()) s["error"] = r.error;
        if (r.flagged) ++flagged;
        segments.push_back(std::move(s));
    }
    const auto schema = manifest.schema.is_object() ? manifest.schema.value("name", std::string()) : std::string();
    return {{"schema", schema},
            {"complete", manifest.complete},
            {"segment_count", manifest.segments.size()},
            {"flagged_count", flagged},
            {"reviews_applied", 0},
            {"policy", manifest.config.is_object() ? manifest.config.value("flag_policy", nlohmann::json::object())
                                                    : nlohmann::json::object()},
            {"segments", segments}};
}

std::string dump_document(const nlohmann::json& j) { return j.dump(2) + "\n"; }

}  // namespace gridscan
