// SPDX-FileCopyrightText: 2026 The gridscan authors
// SPDX-License-Identifier: Apache-2.0

#ifndef GRIDSCAN_CLOUD_POINT_CLOUD_HPP
#define GRIDSCAN_CLOUD_POINT_CLOUD_HPP

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "gridscan/cloud/class_schema.hpp"

namespace gridscan {

using Vec3 = Eigen::Vector3d;
using Normal3 = Eigen::Vector3f;

struct Rgb {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;

    friend bool operator==(const Rgb&, const Rgb&) = default;
};

struct Aabb {
    Vec3 min = Vec3::Zero();
    Vec3 max = Vec3::Zero();
};

/// Raw columnar storage. Optional arrays, when present, have one entry per position.
struct CloudAttributes {
    std::vector<Vec3> positions;
    std::optional<std::vector<Rgb>> rgb;
    std::optional<std::vector<float>> intensity;
    std::optional<std::vector<Normal3>> normals;
    std::optional<std::vector<ClassId>> labels;
};

/// Immutable point cloud. Construction validates attribute lengths, unit
/// normals and (when a schema is attached) label ids. Positions are stored in
/// double precision so geo-referenced coordinates survive unchanged.
class PointCloud {
public:
    PointCloud() = default;
    explicit PointCloud(CloudAttributes attributes, std::shared_ptr<const ClassSchema> schema = nullptr);

    std::size_t size() const noexcept { return data_.positions.size(); }
    bool empty() const noexcept { return data_.positions.empty(); }

    std::span<const Vec3> positions() const noexcept { return data_.positions; }
    const Vec3& position(std::size_t i) const { return data_.positions[i]; }

    bool has_rgb() const noexcept { return data_.rgb.has_value(); }
    bool has_intensity() const noexcept { return data_.intensity.has_value(); }
    bool has_normals() const noexcept { return data_.normals.has_value(); }
    bool has_labels() const noexcept { return data_.labels.has_value(); }

    std::span<const Rgb> rgb() const;
    std::span<const float> intensity() const;
    std::span<const Normal3> normals() const;
    std::span<const ClassId> labels() const;

    const std::shared_ptr<const ClassSchema>& schema() const noexcept { return schema_; }
    const CloudAttributes& attributes() const noexcept { return data_; }

    Vec3 centroid() const;
    Aabb bounds() const;

    /// Points at `indices`, in the given order, keeping every attribute.
    PointCloud subset(std::span<const std::size_t> indices) const;

    PointCloud with_labels(std::vector<ClassId> labels) const;
    PointCloud with_normals(std::vector<Normal3> normals) const;
    PointCloud with_schema(std::shared_ptr<const ClassSchema> schema) const;
    PointCloud without_labels() const;

    /// Bit-exact comparison of every stored attribute plus schema equality.
    friend bool operator==(const PointCloud& a, const PointCloud& b);

private:
    CloudAttributes data_;
    std::shared_ptr<const ClassSchema> schema_;
};

}  // namespace gridscan

#endif  // GRIDSCAN_CLOUD_POINT_CLOUD_HPP
