// SPDX-FileCopyrightText: 2026 The gridscan authors
// SPDX-License-Identifier: Apache-2.0

#ifndef GRIDSCAN_CLOUD_FORMATS_HPP
#define GRIDSCAN_CLOUD_FORMATS_HPP

#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "gridscan/cloud/point_cloud.hpp"

namespace gridscan {

// XYZ text: whitespace separated `x y z [r g b] [label]`, '#' starts a comment line.
PointCloud parse_xyz(std::string_view text, std::shared_ptr<const ClassSchema> schema = nullptr);
std::string write_xyz(const PointCloud& cloud);

enum class PlyEncoding { ascii, binary_little_endian };

struct PlyReadResult {
    PointCloud cloud;
    std::vector<std::string> warnings;  ///< skipped properties, renormalized normals, ...
};

/// Reads PLY 1.0 (ascii or binary_little_endian). If `schema` is null and the
/// header names a built-in schema (`comment schema <name>`), that one is attached.
PlyReadResult parse_ply(std::string_view bytes, std::shared_ptr<const ClassSchema> schema = nullptr);
std::string write_ply(const PointCloud& cloud, PlyEncoding encoding = PlyEncoding::binary_little_endian);

/// GSC1 binary cache: "GSC1", u64 metadata length, JSON metadata, attribute arrays.
PointCloud parse_cache(std::string_view bytes);
std::string write_cache_bytes(const PointCloud& cloud);
PointCloud read_cache(const std::filesystem::path& path);
void write_cache(const PointCloud& cloud, const std::filesystem::path& path);

enum class CloudFormat { xyz, ply, cache };

CloudFormat format_from_name(std::string_view name);
/// Guesses from magic bytes first, extension second.
CloudFormat detect_format(const std::filesystem::path& path, std::string_view head);

PointCloud load_cloud(const std::filesystem::path& path, std::shared_ptr<const ClassSchema> schema = nullptr);
PointCloud load_cloud(const std::filesystem::path& path, CloudFormat format,
                      std::shared_ptr<const ClassSchema> schema = nullptr);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view bytes);

}  // namespace gridscan

#endif  // GRIDSCAN_CLOUD_FORMATS_HPP
