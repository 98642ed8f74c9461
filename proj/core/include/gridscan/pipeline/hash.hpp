// SPDX-FileCopyrightText: 2026 The gridscan authors
// SPDX-License-Identifier: Apache-2.0

#ifndef GRIDSCAN_PIPELINE_HASH_HPP
#define GRIDSCAN_PIPELINE_HASH_HPP

#include <filesystem>
#include <span>
#include <string>
#include <string_view>

namespace gridscan {

/// Lowercase hex SHA-256 of a byte string.
std::string sha256_hex(std::string_view bytes);

/// SHA-256 over the concatenated contents of `paths`, read in order.
std::string sha256_files(std::span<const std::filesystem::path> paths);

}  // namespace gridscan

#endif  // GRIDSCAN_PIPELINE_HASH_HPP
