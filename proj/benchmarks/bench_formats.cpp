// SPDX-FileCopyrightText: 2026 The gridscan authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include <random>

#include "gridscan/cloud/formats.hpp"

namespace {

gridscan::PointCloud labeled_cloud(std::size_t n) {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(0.0, 1000.0);
    gridscan::CloudAttributes a;
    a.positions.resize(n);
    for (auto& p : a.positions) p = {5.0e5 + u(rng), 4.0e6 + u(rng), u(rng) / 20.0};
    a.labels.emplace(n);
    for (auto& l : *a.labels) l = static_cast<gridscan::ClassId>(rng() % 6);
    return gridscan::PointCloud(std::move(a), gridscan::ClassSchema::ts40k());
}

void BM_PlyParse(benchmark::State& state) {
    const auto encoding = state.range(0) ? gridscan::PlyEncoding::binary_little_endian : gridscan::PlyEncoding::ascii;
    const auto bytes = gridscan::write_ply(labeled_cloud(100000), encoding);
    for (auto _ : state) benchmark::DoNotOptimize(gridscan::parse_ply(bytes));
    state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(bytes.size()));
    state.SetLabel(state.range(0) ? "binary" : "ascii");
}
BENCHMARK(BM_PlyParse)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_PlyWrite(benchmark::State& state) {
    const auto encoding = state.range(0) ? gridscan::PlyEncoding::binary_little_endian : gridscan::PlyEncoding::ascii;
    const auto cloud = labeled_cloud(100000);
    for (auto _ : state) benchmark::DoNotOptimize(gridscan::write_ply(cloud, encoding));
    state.SetItemsProcessed(state.iterations() * 100000);
    state.SetLabel(state.range(0) ? "binary" : "ascii");
}
BENCHMARK(BM_PlyWrite)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_CacheRoundTrip(benchmark::State& state) {
    const auto cloud = labeled_cloud(100000);
    for (auto _ : state) benchmark::DoNotOptimize(gridscan::parse_cache(gridscan::write_cache_bytes(cloud)));
    state.SetItemsProcessed(state.iterations() * 100000);
}
BENCHMARK(BM_CacheRoundTrip)->Unit(benchmark::kMillisecond);

}  // namespace
