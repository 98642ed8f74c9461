// SPDX-FileCopyrightText: 2026 The gridscan authors
// SPDX-License-Identifier: Apache-2.0

#include "gridscan/cloud/point_cloud.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>
#include <string>

#include "gridscan/error.hpp"

namespace gridscan {

namespace {

template <class T>
void check_length(const std::optional<std::vector<T>>& column, std::size_t n, const char* name) {
    if (column && column->size() != n) {
        throw DataError(std::string(name) + " has " + std::to_string(column->size()) + " entries, expected " +
                        std::to_string(n));
    }
}

template <class T>
bool same_bits(const std::optional<std::vector<T>>& a, const std::optional<std::vector<T>>& b) {
    if (a.has_value() != b.has_value()) return false;
    if (!a) return true;
    return a->size() == b->size() && (a->empty() || std::memcmp(a->data(), b->data(), a->size() * sizeof(T)) == 0);
}

template <class T>
std::optional<std::vector<T>> gather(const std::optional<std::vector<T>>& column, std::span<const std::size_t> idx) {
    if (!column) return std::nullopt;
    std::vector<T> out;
    out.reserve(idx.size());
    for (auto i : idx) out.push_back((*column)[i]);
    return out;
}

}  // namespace

PointCloud::PointCloud(CloudAttributes attributes, std::shared_ptr<const ClassSchema> schema)
    : data_(std::move(attributes)), schema_(std::move(schema)) {
    const auto n = data_.positions.size();
    check_length(data_.rgb, n, "rgb");
    check_length(data_.intensity, n, "intensity");
    check_length(data_.normals, n, "normals");
    check_length(data_.labels, n, "labels");
    if (data_.normals) {
        for (std::size_t i = 0; i < n; ++i) {
            const double norm = (*data_.normals)[i].cast<double>().norm();
            if (!(std::abs(norm - 1.0) <= 1e-6)) {
                throw DataError("normal at point " + std::to_string(i) + " is not unit length");
            }
        }
    }
    if (data_.labels && schema_) {
        for (std::size_t i = 0; i < n; ++i) {
            if ((*data_.labels)[i] >= schema_->size()) {
                throw DataError("label " + std::to_string((*data_.labels)[i]) + " at point " + std::to_string(i) +
                                " is not a class of schema " + schema_->name());
            }
        }
    }
}

std::span<const Rgb> PointCloud::rgb() const {
    if (!data_.rgb) throw std::logic_error("cloud has no rgb");
    return *data_.rgb;
}

std::span<const float> PointCloud::intensity() const {
    if (!data_.intensity) throw std::logic_error("cloud has no intensity");
    return *data_.intensity;
}

std::span<const Normal3> PointCloud::normals() const {
    if (!data_.normals) throw std::logic_error("cloud has no normals");
    return *data_.normals;
}

std::span<const ClassId> PointCloud::labels() const {
    if (!data_.labels) throw std::logic_error("cloud has no labels");
    return *data_.labels;
}

Vec3 PointCloud::centroid() const {
    if (empty()) return Vec3::Zero();
    // Two-pass mean: offset by the first point so large coordinates keep their low bits.
    const Vec3 origin = data_.positions.front();
    Vec3 acc = Vec3::Zero();
    for (const auto& p : data_.positions) acc += p - origin;
    return origin + acc / static_cast<double>(size());
}

Aabb PointCloud::bounds() const {
    Aabb box;
    if (empty()) return box;
    box.min = box.max = data_.positions.front();
    for (const auto& p : data_.positions) {
        box.min = box.min.cwiseMin(p);
        box.max = box.max.cwiseMax(p);
    }
    return box;
}

PointCloud PointCloud::subset(std::span<const std::size_t> indices) const {
    CloudAttributes out;
    out.positions.reserve(indices.size());
    for (auto i : indices) {
        if (i >= size()) throw std::out_of_range("subset index " + std::to_string(i) + " out of range");
        out.positions.push_back(data_.positions[i]);
    }
    out.rgb = gather(data_.rgb, indices);
    out.intensity = gather(data_.intensity, indices);
    out.normals = gather(data_.normals, indices);
    out.labels = gather(data_.labels, indices);
    return PointCloud(std::move(out), schema_);
}

PointCloud PointCloud::with_labels(std::vector<ClassId> labels) const {
    CloudAttributes copy = data_;
    copy.labels = std::move(labels);
    return PointCloud(std::move(copy), schema_);
}

PointCloud PointCloud::with_normals(std::vector<Normal3> normals) const {
    CloudAttributes copy = data_;
    copy.normals = std::move(normals);
    return PointCloud(std::move(copy), schema_);
}

PointCloud PointCloud::with_schema(std::shared_ptr<const ClassSchema> schema) const {
    return PointCloud(data_, std::move(schema));
}

PointCloud PointCloud::without_labels() const {
    CloudAttributes copy = data_;
    copy.labels.reset();
    return PointCloud(std::move(copy), schema_);
}

bool operator==(const PointCloud& a, const PointCloud& b) {
    if (a.size() != b.size()) return false;
    if (!a.empty() && std::memcmp(a.data_.positions.data(), b.data_.positions.data(), a.size() * sizeof(Vec3)) != 0) {
        return false;
    }
    if (!same_bits(a.data_.rgb, b.data_.rgb) || !same_bits(a.data_.intensity, b.data_.intensity) ||
        !same_bits(a.data_.normals, b.data_.normals) || !same_bits(a.data_.labels, b.data_.labels)) {
        return false;
    }
    if (static_cast<bool>(a.schema_) != static_cast<bool>(b.schema_)) return false;
    return !a.schema_ || *a.schema_ == *b.schema_;
}

}  // namespace gridscan
