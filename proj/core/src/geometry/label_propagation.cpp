// SPDX-FileCopyrightText: 2026 The gridscan authors
// SPDX-License-Identifier: Apache-2.0

#include "gridscan/geometry/label_propagation.hpp"

#include <stdexcept>
#include <string>

#include "gridscan/geometry/kd_tree.hpp"

namespace gridscan {

std::vector<ClassId> propagate_labels(const PointCloud& full, std::span<const std::size_t> subset_indices,
                                      std::span<const ClassId> subset_labels) {
    if (subset_indices.empty()) throw std::invalid_argument("propagate_labels: labeled subset is empty");
    if (subset_indices.size() != subset_labels.size()) {
        throw std::invalid_argument("propagate_labels: " + std::to_string(subset_indices.size()) + " indices but " +
                                    std::to_string(subset_labels.size()) + " labels");
    }
    std::vector<Vec3> anchors;
    anchors.reserve(subset_indices.size());
    for (auto i : subset_indices) {
        if (i >= full.size()) throw std::out_of_range("propagate_labels: subset index out of range");
        anchors.push_back(full.position(i));
    }
    const KdTree index(anchors);
    std::vector<ClassId> labels(full.size());
    for (std::size_t i = 0; i < full.size(); ++i) {
        labels[i] = subset_labels[index.nearest(full.position(i)).index];
    }
    return labels;
}

}  // namespace gridscan
