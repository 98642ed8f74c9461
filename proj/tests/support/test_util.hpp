// SPDX-FileCopyrightText: 2026 The gridscan authors
// SPDX-License-Identifier: Apache-2.0

#ifndef GRIDSCAN_TESTS_TEST_UTIL_HPP
#define GRIDSCAN_TESTS_TEST_UTIL_HPP

#include <atomic>
#include <chrono>
#include <filesystem>
#include <random>
#include <string>

#include "gridscan/cloud/class_schema.hpp"
#include "gridscan/cloud/point_cloud.hpp"

namespace testutil {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::atomic<int> counter{0};
        const auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
        path_ = std::filesystem::temp_directory_path() /
                ("gridscan-" + tag + "-" + std::to_string(stamp) + "-" + std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

struct AttributeMask {
    bool rgb = false, intensity = false, normals = false, labels = false;
};

inline AttributeMask random_mask(std::mt19937_64& rng) {
    const auto bits = rng();
    return {(bits & 1) != 0, (bits & 2) != 0, (bits & 4) != 0, (bits & 8) != 0};
}

/// Cloud with full-entropy double positions (including large geo offsets)
/// and the requested optional attributes.
inline gridscan::PointCloud random_cloud(std::mt19937_64& rng, std::size_t n, AttributeMask mask,
                                         std::shared_ptr<const gridscan::ClassSchema> schema =
                                             gridscan::ClassSchema::ts40k()) {
    std::uniform_real_distribution<double> u(-1000.0, 1000.0);
    std::normal_distribution<double> g(0.0, 1.0);
    gridscan::CloudAttributes a;
    const double ox = 5.0e5 * (rng() % 2), oy = 4.0e6 * (rng() % 2);
    for (std::size_t i = 0; i < n; ++i) a.positions.emplace_back(ox + u(rng), oy + u(rng), u(rng) / 10.0);
    if (mask.rgb) {
        a.rgb.emplace();
        for (std::size_t i = 0; i < n; ++i) {
            const auto b = rng();
            a.rgb->push_back({static_cast<std::uint8_t>(b), static_cast<std::uint8_t>(b >> 8),
                              static_cast<std::uint8_t>(b >> 16)});
        }
    }
    if (mask.intensity) {
        a.intensity.emplace();
        for (std::size_t i = 0; i < n; ++i) a.intensity->push_back(static_cast<float>(u(rng)));
    }
    if (mask.normals) {
        a.normals.emplace();
        for (std::size_t i = 0; i < n; ++i) {
            Eigen::Vector3d v(g(rng), g(rng), g(rng));
            if (v.norm() < 1e-3) v = Eigen::Vector3d::UnitZ();
            a.normals->push_back((v / v.norm()).cast<float>());
        }
    }
    if (mask.labels) {
        a.labels.emplace();
        for (std::size_t i = 0; i < n; ++i) a.labels->push_back(static_cast<gridscan::ClassId>(rng() % schema->size()));
    }
    return gridscan::PointCloud(std::move(a), mask.labels ? schema : nullptr);
}

}  // namespace testutil

#endif  // GRIDSCAN_TESTS_TEST_UTIL_HPP
