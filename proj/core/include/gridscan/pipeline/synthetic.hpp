// SPDX-FileCopyrightText: 2026 The gridscan authors
// SPDX-License-Identifier: Apache-2.0

#ifndef GRIDSCAN_PIPELINE_SYNTHETIC_HPP
#define GRIDSCAN_PIPELINE_SYNTHETIC_HPP

#include <cstdint>
#include <filesystem>
#include <string_view>
#include <vector>

#include "gridscan/cloud/point_cloud.hpp"
#include "gridscan/geometry/ground_filter.hpp"

namespace gridscan {

enum class SyntheticPreset { corridor, tower_radius, power_line, no_tower };

/// Throws std::invalid_argument for unknown names.
SyntheticPreset preset_from_name(std::string_view name);

/// A generated scene with TS40K ground-truth labels. The corridor runs along +x
/// from x = 0 to x = length, centred on y = 0.
struct SyntheticScene {
    PointCloud cloud;
    /// Points inside injected mixed-class regions: trees grown into tower
    /// bases and shrub patches straddling the ground band.
    Mask ambiguous;
    std::vector<Vec3> ambiguous_sites;
    std::vector<Vec3> tower_bases;
    double length = 0.0;
};

/// Deterministic for a given (preset, seed) on every platform: only the raw
/// mt19937_64 stream is used, never library distributions.
SyntheticScene gen_synthetic(SyntheticPreset preset, std::uint64_t seed);

/// Writes the scene cloud as binary PLY with a schema comment.
void write_synthetic(const SyntheticScene& scene, const std::filesystem::path& path);

}  // namespace gridscan

#endif  // GRIDSCAN_PIPELINE_SYNTHETIC_HPP
