// SPDX-FileCopyrightText: 2026 The gridscan authors
// SPDX-License-Identifier: Apache-2.0

#ifndef GRIDSCAN_GEOMETRY_LABEL_PROPAGATION_HPP
#define GRIDSCAN_GEOMETRY_LABEL_PROPAGATION_HPP

#include <cstddef>
#include <span>
#include <vector>

#include "gridscan/cloud/point_cloud.hpp"

namespace gridscan {

/// Nearest-neighbor label transfer from a labeled subset back onto every
/// point of `full`. Equidistant subset points resolve to the lowest position
/// in `subset_indices`. Throws std::invalid_argument for an empty subset or
/// mismatched lengths, std::out_of_range for invalid indices.
std::vector<ClassId> propagate_labels(const PointCloud& full, std::span<const std::size_t> subset_indices,
                                      std::span<const ClassId> subset_labels);

}  // namespace gridscan

#endif  // GRIDSCAN_GEOMETRY_LABEL_PROPAGATION_HPP
