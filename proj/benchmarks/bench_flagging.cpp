// SPDX-FileCopyrightText: 2026 The gridscan authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include <random>

#include "gridscan/flagging/flagging.hpp"
#include "gridscan/metrics/metrics.hpp"

namespace {

void BM_ClusterUndecided(benchmark::State& state) {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(0.0, 50.0);
    const auto n = static_cast<std::size_t>(state.range(0));
    std::vector<gridscan::Vec3> pts(n);
    for (auto& p : pts) p = {u(rng), u(rng) * 0.4, u(rng) * 0.2};
    std::vector<std::uint8_t> mask(n);
    for (auto& m : mask) m = rng() % 10 == 0;
    const gridscan::FlagPolicy policy;
    for (auto _ : state) benchmark::DoNotOptimize(gridscan::cluster_undecided(pts, mask, policy));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ClusterUndecided)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_ConfusionAccumulate(benchmark::State& state) {
    std::mt19937_64 rng(29);
    const auto n = static_cast<std::size_t>(state.range(0));
    std::vector<gridscan::ClassId> truth(n), pred(n);
    for (std::size_t i = 0; i < n; ++i) truth[i] = rng() % 6, pred[i] = rng() % 6;
    const auto schema = gridscan::ClassSchema::ts40k();
    for (auto _ : state) {
        gridscan::ConfusionMatrix cm(schema);
        cm.accumulate(truth, pred);
        benchmark::DoNotOptimize(cm.total());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ConfusionAccumulate)->Arg(1000000)->Unit(benchmark::kMillisecond);

}  // namespace
