// SPDX-FileCopyrightText: 2026 The gridscan authors
// SPDX-License-Identifier: Apache-2.0

// Command-line front end. Exit codes: 0 success, 1 usage error, 2 data error,
// 3 run finished with failed segments.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gridscan/cloud/formats.hpp"
#include "gridscan/error.hpp"
#include "gridscan/metrics/metrics.hpp"
#include "gridscan/pipeline/config.hpp"
#include "gridscan/pipeline/evaluate.hpp"
#include "gridscan/pipeline/run.hpp"
#include "gridscan/pipeline/synthetic.hpp"
#include "gridscan/predictor/softmax_prediction.hpp"
#include "gridscan/review/http_server.hpp"
#include "gridscan/review/review.hpp"

namespace fs = std::filesystem;
using namespace gridscan;

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kData = 2;
constexpr int kPartial = 3;

int cmd_ingest(const std::string& input, const std::string& format, const std::string& out) {
    const auto s = ingest(input, format, out);
    std::cout << s.to_json().dump(2) << "\n";
    return kOk;
}

int cmd_run(const std::string& config_path, int parallelism) {
    auto config = load_run_config(config_path);
    if (parallelism >= 0) config.parallelism = static_cast<std::size_t>(parallelism);
    const auto m = run_inspection(config);
    std::size_t flagged = 0;
    std::size_t failed = 0;
    for (const auto& s : m.segments) {
        flagged += s.flagged ? 1 : 0;
        failed += s.ok() ? 0 : 1;
        if (!s.ok()) std::cerr << "segment " << s.segment_id << ": " << s.error << "\n";
    }
    std::cout << "segments " << m.segments.size() << ", flagged " << flagged << ", failed " << failed << "\n"
              << "run directory " << config.out.string() << "\n";
    return m.complete ? kOk : kPartial;
}

int cmd_eval(const std::string& run, const std::string& truth, std::vector<double> betas,
             const std::vector<std::string>& ignore_names, bool json) {
    const auto manifest = load_manifest(run);
    const auto schema = ClassSchema::from_json(manifest.schema);
    const auto ignore = resolve_class_set(schema, ignore_names);
    if (betas.empty()) betas = {2.0};
    const auto labels = load_truth_labels(truth);
    const auto report = evaluate(run, labels, betas, ignore);
    if (json) {
        std::cout << report.to_json().dump(2) << "\n";
    } else {
        std::cout << report.to_table();
    }
    return kOk;
}

int cmd_synth(const std::string& preset, std::uint64_t seed, const std::string& out, const std::string& ambiguous) {
    const auto scene = gen_synthetic(preset_from_name(preset), seed);
    write_synthetic(scene, out);
    if (!ambiguous.empty()) {
        std::string text;
        for (std::size_t i = 0; i < scene.ambiguous.size(); ++i) {
            if (scene.ambiguous[i]) text += std::to_string(i) + "\n";
        }
        write_file(ambiguous, text);
    }
    std::cout << scene.cloud.size() << " points, " << scene.tower_bases.size() << " towers, length "
              << scene.length << " m\n";
    return kOk;
}

int cmd_serve(const std::string& run, const std::string& host, int port, const std::string& static_dir) {
    ReviewService service(run);
    ReviewServer server(service);
    if (!static_dir.empty() && !server.mount_static(static_dir)) throw DataError("cannot serve " + static_dir);
    std::cout << "serving " << run << " on http://" << host << ":" << port << "\n" << std::flush;
    if (!server.listen(host, port)) throw DataError("cannot listen on " + host + ":" + std::to_string(port));
    return kOk;
}

int cmd_apply_reviews(const std::string& run) {
    const auto result = apply_reviews(run);
    std::cout << "applied " << result.report.at("reviews_applied").get<std::size_t>() << " reviews, "
              << result.report.at("flagged_count").get<std::size_t>() << " segments flagged\n";
    return kOk;
}

int cmd_export_predictions(const std::string& input, const std::string& schema_name, const std::string& out) {
    const auto prediction = parse_probability_text(read_file(input), ClassSchema::builtin(schema_name));
    write_predictions(out, prediction);
    std::cout << prediction.size() << " rows written to " << out << "\n";
    return kOk;
}

int cmd_weights(const std::string& input, const std::string& schema_name) {
    const auto schema = ClassSchema::builtin(schema_name);
    const auto cloud = load_cloud(input, schema);
    if (!cloud.has_labels()) throw DataError(input + " has no labels");
    const auto hist = class_histogram(cloud.labels(), *schema);
    const auto w = inverse_frequency_weights(hist);
    nlohmann::json out = nlohmann::json::array();
    for (std::size_t c = 0; c < schema->size(); ++c) {
        out.push_back({{"id", c},
                       {"name", schema->classes()[c].name},
                       {"count", hist.counts[c]},
                       {"fraction", hist.fractions[c]},
                       {"weight", w.weights[c]},
                       {"absent", w.absent[c] != 0}});
    }
    std::cout << out.dump(2) << "\n";
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"gridscan: power-grid LiDAR inspection toolkit"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(tool_version()));

    std::string input, format = "auto", out, config, run, truth, preset = "corridor", ambiguous, schema = "ts40k";
    std::vector<double> betas;
    std::vector<std::string> ignore;
    std::uint64_t seed = 42;
    int parallelism = -1;
    bool json = false;

    auto* ingest_cmd = app.add_subcommand("ingest", "Parse a point cloud and store it as a binary cache");
    ingest_cmd->add_option("--input", input, "Input cloud")->required()->check(CLI::ExistingFile);
    ingest_cmd->add_option("--format", format, "xyz, ply, cache or auto")->capture_default_str();
    ingest_cmd->add_option("--out", out, "Output directory")->required();

    auto* run_cmd = app.add_subcommand("run", "Run the inspection pipeline");
    run_cmd->add_option("--config", config, "Run configuration (JSON)")->required()->check(CLI::ExistingFile);
    run_cmd->add_option("--parallelism", parallelism, "Override the worker count (0 = all cores)");

    auto* eval_cmd = app.add_subcommand("eval", "Score a run against ground-truth labels");
    eval_cmd->add_option("--run", run, "Run directory")->required()->check(CLI::ExistingDirectory);
    eval_cmd->add_option("--truth", truth, "Labeled cloud aligned with the run input")->required()->check(CLI::ExistingFile);
    eval_cmd->add_option("--beta", betas, "F-beta weights (repeatable, default 2)");
    eval_cmd->add_option("--ignore", ignore, "Class names or ids left out of aggregates (repeatable)");
    eval_cmd->add_flag("--json", json, "Print JSON instead of a table");

    auto* synth_cmd = app.add_subcommand("synth", "Generate a labeled synthetic corridor");
    synth_cmd->add_option("--preset", preset, "corridor, tower_radius, power_line or no_tower")->capture_default_str();
    synth_cmd->add_option("--seed", seed, "Generator seed")->capture_default_str();
    synth_cmd->add_option("--out", out, "Output PLY")->required();
    synth_cmd->add_option("--ambiguous-out", ambiguous, "Write indices of mixed-class points, one per line");

    std::string host = "127.0.0.1", static_dir;
    int port = 8080;
    auto* serve_cmd = app.add_subcommand("serve", "Serve a run directory to reviewers over HTTP");
    serve_cmd->add_option("--run", run, "Run directory")->required()->check(CLI::ExistingDirectory);
    serve_cmd->add_option("--port", port, "TCP port")->capture_default_str();
    serve_cmd->add_option("--host", host, "Bind address")->capture_default_str();
    serve_cmd->add_option("--static", static_dir, "Directory with the browser client");

    auto* apply_cmd = app.add_subcommand("apply-reviews", "Replay the review log into report.reviewed.json");
    apply_cmd->add_option("--run", run, "Run directory")->required()->check(CLI::ExistingDirectory);

    auto* export_cmd = app.add_subcommand("export-predictions", "Convert per-point probability text to a prediction file");
    export_cmd->add_option("--input", input, "Whitespace-separated probabilities, one row per point")->required();
    export_cmd->add_option("--schema", schema, "Class schema")->capture_default_str();
    export_cmd->add_option("--out", out, "Output prediction file")->required();

    auto* weights_cmd = app.add_subcommand("weights", "Print class histogram and inverse-frequency weights");
    weights_cmd->add_option("--input", input, "Labeled cloud")->required()->check(CLI::ExistingFile);
    weights_cmd->add_option("--schema", schema, "Class schema")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*ingest_cmd) return cmd_ingest(input, format, out);
        if (*run_cmd) return cmd_run(config, parallelism);
        if (*eval_cmd) return cmd_eval(run, truth, betas, ignore, json);
        if (*synth_cmd) return cmd_synth(preset, seed, out, ambiguous);
        if (*serve_cmd) return cmd_serve(run, host, port, static_dir);
        if (*apply_cmd) return cmd_apply_reviews(run);
        if (*export_cmd) return cmd_export_predictions(input, schema, out);
        if (*weights_cmd) return cmd_weights(input, schema);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const NotFoundError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kData;
    }
    return kUsage;
}
