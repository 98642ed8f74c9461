// SPDX-FileCopyrightText: 2026 The gridscan authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <map>
#include <random>

#include "gridscan/partition/corridor.hpp"
#include "oracles.hpp"

using namespace gridscan;

namespace {

PointCloud cloud_of(std::vector<Vec3> pts) {
    CloudAttributes a;
    a.positions = std::move(pts);
    return PointCloud(std::move(a));
}

/// Independent binning: bin = floor((t - t_min) / L), then lower-neighbor merges.
std::vector<std::vector<std::size_t>> binning_oracle(const std::vector<double>& t, double L, std::size_t min_pts) {
    const double t0 = *std::min_element(t.begin(), t.end());
    std::map<long, std::vector<std::size_t>> bins;
    long last = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const long b = static_cast<long>(std::floor((t[i] - t0) / L));
        bins[b].push_back(i);
        last = std::max(last, b);
    }
    std::vector<std::vector<std::size_t>> groups;
    for (long b = 0; b <= last; ++b) {
        auto& members = bins[b];
        if (groups.empty() || members.size() >= std::max<std::size_t>(1, min_pts)) {
            groups.push_back(members);
        } else {
            groups.back().insert(groups.back().end(), members.begin(), members.end());
        }
    }
    if (groups.size() > 1 && groups.front().size() < std::max<std::size_t>(1, min_pts)) {
        groups[1].insert(groups[1].begin(), groups[0].begin(), groups[0].end());
        groups.erase(groups.begin());
    }
    for (auto& g : groups) std::sort(g.begin(), g.end());
    return groups;
}

}  // namespace

TEST_CASE("corridor axis examples") {
    std::vector<Vec3> along_x, along_diag, noisy;
    for (int i = 0; i < 100; ++i) {
        along_x.emplace_back(100.0 - i, 0.0, 0.0);
        along_diag.emplace_back(3.0 + i, 3.0 + i, i % 3);
    }
    const auto ax = estimate_corridor_axis(cloud_of(along_x));
    CHECK(ax.direction.x() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(ax.direction.y()) < 1e-12);
    CHECK_FALSE(ax.degenerate);
    CHECK(ax.origin.x() == doctest::Approx(50.5));

    const auto ad = estimate_corridor_axis(cloud_of(along_diag));
    CHECK(std::abs(ad.direction.x() - std::sqrt(0.5)) < 1e-9);
    CHECK(std::abs(ad.direction.y() - std::sqrt(0.5)) < 1e-9);

    const auto square = estimate_corridor_axis(cloud_of({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0}}));
    CHECK(square.degenerate);
    CHECK(square.direction == Eigen::Vector2d(1, 0));

    CHECK_THROWS_AS(estimate_corridor_axis(cloud_of({{0, 0, 0}})), std::invalid_argument);
}

TEST_CASE("uniform 100 m corridor splits in two halves") {
    std::vector<Vec3> pts;
    for (int i = 0; i < 10000; ++i) pts.emplace_back(i / 100.0, (i % 7) * 0.5, 0.0);
    const auto c = cloud_of(pts);
    const auto segs = partition_corridor(c, estimate_corridor_axis(c), {50.0, 1000});
    REQUIRE(segs.size() == 2);
    CHECK(segs[0].point_indices.size() == 5000);
    CHECK(segs[1].point_indices.size() == 5000);
    CHECK(segs[1].point_indices.front() == 5000);
    CHECK(segs[0].segment_id == 0);
    CHECK(segs[1].segment_id == 1);
    CHECK(segs[0].t_end == segs[1].t_start);
    CHECK(segs[1].bounds.min.x() == 50.0);
}

TEST_CASE("short corridors and sparse trailing bins collapse to one segment") {
    std::vector<Vec3> pts;
    for (int i = 0; i < 2000; ++i) pts.emplace_back(i * 0.005, (i % 5) * 0.1, 0.0);
    const auto c = cloud_of(pts);
    CHECK(partition_corridor(c, estimate_corridor_axis(c)).size() == 1);

    std::vector<Vec3> lopsided;
    for (int i = 0; i < 5000; ++i) lopsided.emplace_back(i * 0.01, (i % 3) * 0.2, 0.0);
    for (int i = 0; i < 10; ++i) lopsided.emplace_back(55.0 + 4.5 * i, 0.0, 0.0);
    const auto l = cloud_of(lopsided);
    const auto segs = partition_corridor(l, estimate_corridor_axis(l), {50.0, 1000});
    REQUIRE(segs.size() == 1);
    CHECK(segs[0].point_indices.size() == 5010);

    CHECK(partition_corridor(PointCloud{}, CorridorAxis{}).empty());
    CHECK_THROWS_AS(partition_corridor(l, CorridorAxis{}, {0.0, 10}), std::invalid_argument);
}

TEST_CASE("partition matches the binning oracle and conserves points") {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 40; ++trial) {
        std::uniform_real_distribution<double> u(0.0, 300.0), w(-15.0, 15.0);
        std::vector<Vec3> pts;
        const std::size_t n = 100 + rng() % 5000;
        const bool clumpy = trial % 2 == 0;
        for (std::size_t i = 0; i < n; ++i) {
            double x = u(rng);
            if (clumpy && (rng() % 4 != 0)) x = std::fmod(x, 40.0);
            pts.emplace_back(x, w(rng) * 0.2 + 0.1 * x, w(rng));
        }
        const auto c = cloud_of(pts);
        const auto axis = estimate_corridor_axis(c);
        const PartitionParams params{10.0 + static_cast<double>(rng() % 60), rng() % 400};
        const auto segs = partition_corridor(c, axis, params);

        std::vector<double> t;
        for (const auto& p : pts) t.push_back(axis.project(p));
        const auto want = binning_oracle(t, params.segment_length, params.min_points);

        std::vector<int> seen(n, 0);
        double prev_start = -std::numeric_limits<double>::infinity();
        for (std::size_t s = 0; s < segs.size(); ++s) {
            CHECK(segs[s].segment_id == s);
            CHECK(std::is_sorted(segs[s].point_indices.begin(), segs[s].point_indices.end()));
            CHECK(segs[s].t_start > prev_start);
            if (s > 0) CHECK(segs[s].t_start == segs[s - 1].t_end);
            prev_start = segs[s].t_start;
            for (auto i : segs[s].point_indices) ++seen[i];
        }
        CHECK(std::all_of(seen.begin(), seen.end(), [](int v) { return v == 1; }));
        CHECK(segs.size() == want.size());
        if (segs.size() == want.size()) {
            std::size_t mismatched = 0;
            for (std::size_t s = 0; s < segs.size(); ++s) mismatched += segs[s].point_indices != want[s];
            CHECK(mismatched == 0);
        }
        CHECK(partition_corridor(c, axis, params).size() == segs.size());
    }
}
