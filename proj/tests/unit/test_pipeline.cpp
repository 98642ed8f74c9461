// SPDX-FileCopyrightText: 2026 The gridscan authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <fstream>

#include "gridscan/cloud/formats.hpp"
#include "gridscan/error.hpp"
#include "gridscan/metrics/metrics.hpp"
#include "gridscan/pipeline/config.hpp"
#include "gridscan/pipeline/evaluate.hpp"
#include "gridscan/pipeline/hash.hpp"
#include "gridscan/pipeline/run.hpp"
#include "gridscan/pipeline/synthetic.hpp"
#include "gridscan/predictor/softmax_prediction.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace gridscan;
namespace fs = std::filesystem;

namespace {

struct Fixture {
    testutil::TempDir dir{"pipeline"};
    SyntheticScene scene;
    fs::path input;

    Fixture(SyntheticPreset preset, std::uint64_t seed) : scene(gen_synthetic(preset, seed)) {
        input = dir / "scene.ply";
        write_synthetic(scene, input);
    }

    RunConfig config(const std::string& name) const {
        RunConfig c;
        c.input = {input};
        c.out = dir / name;
        return c;
    }

    std::vector<ClassId> truth() const {
        const auto l = scene.cloud.labels();
        return {l.begin(), l.end()};
    }
};

std::vector<ClassId> emitted_labels(const fs::path& run, const SegmentRecord& s) {
    const auto c = load_cloud(run / s.points_file, ClassSchema::ts40k());
    const auto l = c.labels();
    return {l.begin(), l.end()};
}

}  // namespace

TEST_CASE("synthetic scenes are deterministic and labeled") {
    const auto a = gen_synthetic(SyntheticPreset::corridor, 42);
    const auto b = gen_synthetic(SyntheticPreset::corridor, 42);
    CHECK(write_ply(a.cloud) == write_ply(b.cloud));
    CHECK(a.ambiguous == b.ambiguous);
    CHECK(write_ply(gen_synthetic(SyntheticPreset::corridor, 43).cloud) != write_ply(a.cloud));
    CHECK(a.cloud.has_labels());
    CHECK(a.length >= 150.0);
    CHECK(a.length <= 250.0);
    CHECK(a.tower_bases.size() >= 2);
    CHECK(a.tower_bases.size() <= 4);

    testutil::TempDir dir("synth");
    write_synthetic(a, dir / "a.ply");
    write_synthetic(b, dir / "b.ply");
    CHECK(sha256_files(std::vector<fs::path>{dir / "a.ply"}) == sha256_files(std::vector<fs::path>{dir / "b.ply"}));
    CHECK(load_cloud(dir / "a.ply") == a.cloud);

    CHECK_THROWS_AS(preset_from_name("desert"), std::invalid_argument);
    CHECK(preset_from_name("tower_radius") == SyntheticPreset::tower_radius);
}

TEST_CASE("synthetic class shares follow the generator bookkeeping") {
    for (std::uint64_t seed : {1u, 42u, 7u}) {
        const auto s = gen_synthetic(SyntheticPreset::corridor, seed);
        const auto h = class_histogram(s.cloud.labels(), *ClassSchema::ts40k());
        CHECK(h.fractions[1] >= 0.45);
        CHECK(h.fractions[1] <= 0.65);
        CHECK(h.fractions[4] + h.fractions[5] < 0.05);
        CHECK(h.counts[4] > 0);
        CHECK(h.counts[5] > 0);
    }
    const auto nt = gen_synthetic(SyntheticPreset::no_tower, 3);
    CHECK(class_histogram(nt.cloud.labels(), *ClassSchema::ts40k()).counts[4] == 0);
    const auto pl = gen_synthetic(SyntheticPreset::power_line, 3);
    const auto ph = class_histogram(pl.cloud.labels(), *ClassSchema::ts40k());
    CHECK(ph.counts[4] == 0);
    CHECK(ph.counts[5] > 0);
    const auto tr = gen_synthetic(SyntheticPreset::tower_radius, 3);
    CHECK(tr.tower_bases.size() == 1);
}

TEST_CASE("run config JSON") {
    testutil::TempDir dir("config");
    const auto j = nlohmann::json::parse(R"({
        "input": ["a.ply", "/abs/b.xyz"], "schema": "tsrgb", "segment_length": 40,
        "fps_budget": 5000, "predictor": {"kind": "file", "path_pattern": "preds/{id}.bin"},
        "flag_policy": {"margin_threshold": 0.3}, "remove_ground": true,
        "label_propagation": "full_cloud", "out": "run", "parallelism": 2})");
    const auto c = RunConfig::from_json(j, dir.path());
    CHECK(c.input[0] == dir / "a.ply");
    CHECK(c.input[1] == fs::path("/abs/b.xyz"));
    CHECK(c.schema == "tsrgb");
    CHECK(c.predictor == PredictorKind::file);
    CHECK(c.prediction_pattern == (dir / "preds/{id}.bin").string());
    CHECK(c.flag_policy.margin_threshold == 0.3);
    CHECK(c.label_propagation == LabelPropagation::full_cloud);
    CHECK(c.out == dir / "run");
    CHECK(RunConfig::from_json(c.to_json()).to_json() == c.to_json());
    CHECK_FALSE(c.to_json(false).contains("out"));

    auto extra = j;
    extra["segment_lenght"] = 10;
    CHECK_THROWS_AS(RunConfig::from_json(extra, dir.path()), std::invalid_argument);
    auto negative = j;
    negative["segment_length"] = -1;
    CHECK_THROWS_AS(RunConfig::from_json(negative, dir.path()).validate(), std::invalid_argument);

    CHECK(prediction_path("p/{id}.bin", 3) == fs::path("p/3.bin"));
    std::ofstream(dir / "cfg.json") << j.dump();
    CHECK(load_run_config(dir / "cfg.json").input[0] == dir / "a.ply");
}

TEST_CASE("corridor run writes the run directory") {
    Fixture fx(SyntheticPreset::corridor, 42);
    const auto cfg = fx.config("run");
    const auto m = run_inspection(cfg);
    CHECK(m.complete);
    CHECK(m.segments.size() >= 2);
    CHECK(m.input_point_count == fx.scene.cloud.size());
    CHECK(m.input_sha256.size() == 64);
    std::vector<int> seen(m.input_point_count, 0);
    for (const auto& s : m.segments) {
        CHECK(s.ok());
        CHECK(s.sampled_count <= 100000);
        CHECK(s.sampled_count == s.sampled_indices.size());
        CHECK(s.point_count == s.member_indices.size());
        for (auto i : s.member_indices) ++seen[i];
        for (const char* f : {run_layout::kPoints, run_layout::kPredictions, run_layout::kFlags})
            CHECK(fs::exists(cfg.out / run_layout::segment_dir(s.segment_id) / f));
        CHECK(emitted_labels(cfg.out, s).size() == s.sampled_count);
    }
    CHECK(std::all_of(seen.begin(), seen.end(), [](int v) { return v == 1; }));
    for (const char* f : {run_layout::kManifest, run_layout::kReport, run_layout::kReviews})
        CHECK(fs::exists(cfg.out / f));
    CHECK(read_file(cfg.out / run_layout::kReviews).empty());

    const auto loaded = load_manifest(cfg.out);
    CHECK(manifest_fingerprint(loaded) == manifest_fingerprint(m));
    CHECK(m.timing.contains("total_seconds"));

    const auto report = nlohmann::json::parse(read_file(cfg.out / run_layout::kReport));
    CHECK(report["segment_count"] == m.segments.size());
    CHECK(load_manifest(cfg.out).replay_config(cfg.out).to_json() == cfg.to_json());
    CHECK_THROWS_AS(load_manifest(fx.dir / "nowhere"), NotFoundError);
}

TEST_CASE("runs are deterministic across output directories and worker counts") {
    Fixture fx(SyntheticPreset::tower_radius, 5);
    auto a = fx.config("a");
    auto b = fx.config("b");
    a.fps_budget = b.fps_budget = 20000;
    a.segment_length = b.segment_length = 25;
    b.parallelism = 3;
    auto ma = run_inspection(a), mb = run_inspection(b);
    // Worker count is part of the snapshot; everything it could influence must not differ.
    CHECK(ma.config["parallelism"] == 1);
    CHECK(mb.config["parallelism"] == 3);
    ma.config.erase("parallelism");
    mb.config.erase("parallelism");
    const bool same = manifest_fingerprint(ma) == manifest_fingerprint(mb);
    CHECK(same);
    CHECK(read_file(a.out / run_layout::kReport) == read_file(b.out / run_layout::kReport));
    for (const auto& s : ma.segments) {
        CHECK(s.sampled_count <= 20000);
        CHECK(read_file(a.out / s.points_file) == read_file(b.out / s.points_file));
        CHECK(read_file(a.out / s.predictions_file) == read_file(b.out / s.predictions_file));
    }
}

TEST_CASE("fps budget above segment size keeps every point") {
    Fixture fx(SyntheticPreset::tower_radius, 6);
    auto cfg = fx.config("big");
    cfg.fps_budget = 10000000;
    const auto m = run_inspection(cfg);
    for (const auto& s : m.segments) {
        CHECK(s.sampled_count == s.point_count);
        CHECK(s.sampled_indices == s.member_indices);
        CHECK(s.coverage_radius == 0.0);
    }
}

TEST_CASE("file predictor errors stay inside their segment") {
    Fixture fx(SyntheticPreset::corridor, 42);
    auto base = fx.config("heuristic");
    const auto ref = run_inspection(base);
    REQUIRE(ref.segments.size() >= 3);

    fs::create_directories(fx.dir / "preds");
    for (const auto& s : ref.segments) fs::copy_file(base.out / s.predictions_file, fx.dir / "preds" / (std::to_string(s.segment_id) + ".bin"));
    // Segment 0 gets the predictions of segment 1 (wrong N); segment 2 has none.
    fs::copy_file(base.out / ref.segments[1].predictions_file, fx.dir / "preds" / "0.bin",
                  fs::copy_options::overwrite_existing);
    fs::remove(fx.dir / "preds" / "2.bin");

    auto cfg = fx.config("file");
    cfg.predictor = PredictorKind::file;
    cfg.prediction_pattern = (fx.dir / "preds" / "{id}.bin").string();
    const auto m = run_inspection(cfg);
    CHECK_FALSE(m.complete);
    CHECK(m.segments[0].status == "error");
    CHECK(m.segments[0].error.find("rows") != std::string::npos);
    CHECK(m.segments[2].status == "error");
    CHECK_FALSE(fs::exists(cfg.out / run_layout::segment_dir(0)));
    for (std::size_t i = 0; i < m.segments.size(); ++i) {
        if (i == 0 || i == 2) continue;
        CHECK(m.segments[i].ok());
        CHECK(read_file(cfg.out / m.segments[i].points_file) == read_file(base.out / ref.segments[i].points_file));
        CHECK(m.segments[i].flagged == ref.segments[i].flagged);
    }
}

TEST_CASE("evaluation against predictions, truth and an out-of-band recount") {
    Fixture fx(SyntheticPreset::tower_radius, 8);
    auto cfg = fx.config("eval");
    const auto m = run_inspection(cfg);

    // Truth equal to the emitted labels scores perfectly.
    std::vector<ClassId> echo(m.input_point_count, 0);
    for (const auto& s : m.segments) {
        const auto l = emitted_labels(cfg.out, s);
        for (std::size_t r = 0; r < l.size(); ++r) echo[s.sampled_indices[r]] = l[r];
    }
    const auto perfect = evaluate(cfg.out, echo, {2.0});
    CHECK(*perfect.miou == 1.0);
    for (const auto& c : perfect.classes) {
        if (!c.iou) continue;
        CHECK(*c.iou == 1.0);
        CHECK(c.f_beta[0] == 1.0);
    }

    const auto truth = fx.truth();
    const auto report = evaluate(cfg.out, truth, {0.5, 1.0, 2.0}, {0});
    CHECK(fs::exists(cfg.out / run_layout::kEvaluation));
    CHECK(report.model == "heuristic");
    std::vector<ClassId> t, p;
    for (const auto& s : m.segments) {
        const auto l = emitted_labels(cfg.out, s);
        for (std::size_t r = 0; r < l.size(); ++r) {
            if (truth[s.sampled_indices[r]] == 0) continue;
            t.push_back(truth[s.sampled_indices[r]]);
            p.push_back(l[r]);
        }
    }
    for (const auto& c : report.classes) {
        if (c.ignored) continue;
        const auto k = oracle::tally(t, p, c.id);
        CHECK(c.pr.precision == doctest::Approx(oracle::ratio(k.tp, k.tp + k.fp)).epsilon(1e-12));
        CHECK(c.pr.recall == doctest::Approx(oracle::ratio(k.tp, k.tp + k.fn)).epsilon(1e-12));
        if (c.pr.precision != c.pr.recall && c.pr.precision > 0 && c.pr.recall > 0) {
            const double lo = std::min(c.f_beta[0], c.f_beta[2]), hi = std::max(c.f_beta[0], c.f_beta[2]);
            CHECK(c.f_beta[1] > lo);
            CHECK(c.f_beta[1] < hi);
        }
    }
    std::vector<ClassId> short_truth(truth.begin(), truth.end() - 1);
    CHECK_THROWS_AS(evaluate(cfg.out, short_truth), DataError);
}

TEST_CASE("full cloud reconstruction labels every input point") {
    Fixture fx(SyntheticPreset::power_line, 9);
    auto cfg = fx.config("full");
    cfg.label_propagation = LabelPropagation::full_cloud;
    cfg.fps_budget = 4000;
    cfg.remove_ground = true;
    cfg.estimate_normals = true;
    const auto m = run_inspection(cfg);
    CHECK(m.ground_removed);
    CHECK(m.ground_point_count > 0);
    CHECK(m.reconstructed_count == m.input_point_count);
    const auto rec = load_cloud(cfg.out / m.reconstruction_file, ClassSchema::ts40k());
    CHECK(rec.size() == m.input_point_count);
    CHECK(rec.labels().size() == m.input_point_count);
    const auto report = evaluate(cfg.out, fx.truth(), {2.0}, {0});
    CHECK(report.total_points > m.input_point_count - m.input_point_count / 20);
}

TEST_CASE("ingest caches a parsed cloud") {
    Fixture fx(SyntheticPreset::no_tower, 10);
    const auto summary = ingest(fx.input, "ply", fx.dir / "ingested");
    CHECK(summary.point_count == fx.scene.cloud.size());
    CHECK(read_cache(summary.cache_path) == fx.scene.cloud);
    CHECK(fs::exists(fx.dir / "ingested" / "ingest.json"));
    CHECK_THROWS(ingest(fx.dir / "missing.ply", "ply", fx.dir / "x"));
}
