// SPDX-FileCopyrightText: 2026 The gridscan authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include <random>

#include "gridscan/geometry/fps.hpp"
#include "gridscan/geometry/ground_filter.hpp"
#include "gridscan/geometry/kd_tree.hpp"
#include "gridscan/geometry/normals.hpp"

namespace {

std::vector<gridscan::Vec3> corridor_points(std::size_t n) {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> x(0.0, 50.0), y(-20.0, 20.0), z(0.0, 30.0);
    std::vector<gridscan::Vec3> pts(n);
    for (auto& p : pts) p = {x(rng), y(rng), z(rng)};
    return pts;
}

void BM_FarthestPointSample(benchmark::State& state) {
    const auto pts = corridor_points(static_cast<std::size_t>(state.range(0)));
    const auto k = static_cast<std::size_t>(state.range(1));
    for (auto _ : state) benchmark::DoNotOptimize(gridscan::farthest_point_sample(pts, k));
    state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(1));
}
BENCHMARK(BM_FarthestPointSample)->Args({10000, 1000})->Args({100000, 10000})->Unit(benchmark::kMillisecond);

void BM_KdTreeBuild(benchmark::State& state) {
    const auto pts = corridor_points(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(gridscan::KdTree(pts));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_KdTreeBuild)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_KdTreeKnn(benchmark::State& state) {
    const auto pts = corridor_points(100000);
    const gridscan::KdTree tree(pts);
    const auto queries = corridor_points(1000);
    const auto k = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) {
        for (const auto& q : queries) benchmark::DoNotOptimize(tree.knn(q, k));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(queries.size()));
}
BENCHMARK(BM_KdTreeKnn)->Arg(1)->Arg(16)->Unit(benchmark::kMicrosecond);

void BM_EstimateNormals(benchmark::State& state) {
    gridscan::CloudAttributes a;
    a.positions = corridor_points(static_cast<std::size_t>(state.range(0)));
    const gridscan::PointCloud cloud(std::move(a));
    for (auto _ : state) benchmark::DoNotOptimize(gridscan::estimate_normals(cloud, 16));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_EstimateNormals)->Arg(20000)->Unit(benchmark::kMillisecond);

void BM_FilterGround(benchmark::State& state) {
    const auto pts = corridor_points(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(gridscan::filter_ground(pts));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_FilterGround)->Arg(100000)->Unit(benchmark::kMillisecond);

}  // namespace
