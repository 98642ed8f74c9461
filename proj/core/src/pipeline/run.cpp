// SPDX-FileCopyrightText: 2026 The gridscan authors
// SPDX-License-Identifier: Apache-2.0

#include "gridscan/pipeline/run.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <optional>
#include <stdexcept>

#include "detail/parallel.hpp"
#include "gridscan/cloud/formats.hpp"
#include "gridscan/error.hpp"
#include "gridscan/flagging/flagging.hpp"
#include "gridscan/geometry/fps.hpp"
#include "gridscan/geometry/ground_filter.hpp"
#include "gridscan/geometry/label_propagation.hpp"
#include "gridscan/geometry/normals.hpp"
#include "gridscan/pipeline/hash.hpp"
#include "gridscan/pipeline/report.hpp"
#include "gridscan/predictor/heuristic.hpp"
#include "gridscan/predictor/softmax_prediction.hpp"

namespace gridscan {

namespace fs = std::filesystem;

std::string_view tool_version() noexcept { return "0.3.0"; }

fs::path run_layout::segment_dir(std::size_t segment_id) { return fs::path("segments") / std::to_string(segment_id); }

nlohmann::json SegmentRecord::to_json() const {
    nlohmann::json j = {{"segment_id", segment_id},
                        {"status", status},
                        {"t_start", t_start},
                        {"t_end", t_end},
                        {"point_count", point_count},
                        {"sampled_count", sampled_count},
                        {"coverage_radius", coverage_radius},
                        {"flagged", flagged},
                        {"undecided_count", undecided_count},
                        {"cluster_count", cluster_count},
                        {"files", {{"points", points_file}, {"predictions", predictions_file}, {"flags", flags_file}}},
                        {"member_indices", member_indices},
                        {"sampled_indices", sampled_indices}};
    if (!ok()) j["error"] = error;
    return j;
}

SegmentRecord SegmentRecord::from_json(const nlohmann::json& j) {
    SegmentRecord r;
    r.segment_id = j.at("segment_id").get<std::size_t>();
    r.status = j.at("status").get<std::string>();
    r.error = j.value("error", std::string());
    r.t_start = j.at("t_start").get<double>();
    r.t_end = j.at("t_end").get<double>();
    r.point_count = j.at("point_count").get<std::size_t>();
    r.sampled_count = j.at("sampled_count").get<std::size_t>();
    r.coverage_radius = j.at("coverage_radius").get<double>();
    r.flagged = j.at("flagged").get<bool>();
    r.undecided_count = j.at("undecided_count").get<std::size_t>();
    r.cluster_count = j.at("cluster_count").get<std::size_t>();
    const auto& files = j.at("files");
    r.points_file = files.at("points").get<std::string>();
    r.predictions_file = files.at("predictions").get<std::string>();
    r.flags_file = files.at("flags").get<std::string>();
    r.member_indices = j.at("member_indices").get<std::vector<std::size_t>>();
    r.sampled_indices = j.at("sampled_indices").get<std::vector<std::size_t>>();
    return r;
}

nlohmann::json RunManifest::to_json() const {
    nlohmann::json segs = nlohmann::json::array();
    for (const auto& s : segments) segs.push_back(s.to_json());
    return {{"tool", {{"name", "gridscan"}, {"version", tool_version}}},
            {"input", {{"paths", input_paths}, {"sha256", input_sha256}, {"point_count", input_point_count}}},
            {"config", config},
            {"schema", schema},
            {"axis",
             {{"origin", {axis.origin.x(), axis.origin.y(), axis.origin.z()}},
              {"direction", {axis.direction.x(), axis.direction.y()}},
              {"degenerate", axis.degenerate}}},
            {"ground", {{"removed", ground_removed}, {"point_count", ground_point_count}}},
            {"segments", segs},
            {"reconstruction",
             {{"mode", reconstruction_mode}, {"file", reconstruction_file}, {"point_count", reconstructed_count}}},
            {"complete", complete},
            {"timing", timing}};
}

RunManifest RunManifest::from_json(const nlohmann::json& j) {
    RunManifest m;
    m.tool_version = j.at("tool").at("version").get<std::string>();
    const auto& in = j.at("input");
    m.input_paths = in.at("paths").get<std::vector<std::string>>();
    m.input_sha256 = in.at("sha256").get<std::string>();
    m.input_point_count = in.at("point_count").get<std::size_t>();
    m.config = j.at("config");
    m.schema = j.at("schema");
    const auto& axis = j.at("axis");
    const auto o = axis.at("origin").get<std::vector<double>>();
    const auto d = axis.at("direction").get<std::vector<double>>();
    if (o.size() != 3 || d.size() != 2) throw DataError("manifest: malformed axis");
    m.axis.origin = Vec3(o[0], o[1], o[2]);
    m.axis.direction = Eigen::Vector2d(d[0], d[1]);
    m.axis.degenerate = axis.at("degenerate").get<bool>();
    m.ground_removed = j.at("ground").at("removed").get<bool>();
    m.ground_point_count = j.at("ground").at("point_count").get<std::size_t>();
    for (const auto& s : j.at("segments")) m.segments.push_back(SegmentRecord::from_json(s));
    const auto& rec = j.at("reconstruction");
    m.reconstruction_mode = rec.at("mode").get<std::string>();
    m.reconstruction_file = rec.at("file").get<std::string>();
    m.reconstructed_count = rec.at("point_count").get<std::size_t>();
    m.complete = j.at("complete").get<bool>();
    m.timing = j.value("timing", nlohmann::json::object());
    return m;
}

RunConfig RunManifest::replay_config(const fs::path& out) const {
    auto c = RunConfig::from_json(config);
    c.out = out;
    return c;
}

RunManifest load_manifest(const fs::path& run_dir) {
    const auto path = run_dir / run_layout::kManifest;
    if (!fs::exists(path)) throw NotFoundError("no manifest in " + run_dir.string());
    try {
        return RunManifest::from_json(nlohmann::json::parse(read_file(path)));
    } catch (const nlohmann::json::exception& e) {
        throw DataError("manifest " + path.string() + ": " + e.what());
    }
}

std::string manifest_fingerprint(const RunManifest& manifest) {
    auto j = manifest.to_json();
    j.erase("timing");
    return j.dump();
}

PointCloud concatenate(const std::vector<PointCloud>& clouds) {
    if (clouds.empty()) return {};
    if (clouds.size() == 1) return clouds.front();
    const auto& first = clouds.front();
    CloudAttributes out;
    if (first.has_rgb()) out.rgb.emplace();
    if (first.has_intensity()) out.intensity.emplace();
    if (first.has_normals()) out.normals.emplace();
    if (first.has_labels()) out.labels.emplace();
    for (const auto& c : clouds) {
        if (c.has_rgb() != first.has_rgb() || c.has_intensity() != first.has_intensity() ||
            c.has_normals() != first.has_normals() || c.has_labels() != first.has_labels()) {
            throw DataError("cannot concatenate clouds with different attributes");
        }
        const auto& a = c.attributes();
        out.positions.insert(out.positions.end(), a.positions.begin(), a.positions.end());
        if (out.rgb) out.rgb->insert(out.rgb->end(), a.rgb->begin(), a.rgb->end());
        if (out.intensity) out.intensity->insert(out.intensity->end(), a.intensity->begin(), a.intensity->end());
        if (out.normals) out.normals->insert(out.normals->end(), a.normals->begin(), a.normals->end());
        if (out.labels) out.labels->insert(out.labels->end(), a.labels->begin(), a.labels->end());
    }
    return PointCloud(std::move(out), first.schema());
}

PointCloud load_inputs(const RunConfig& config) {
    std::vector<PointCloud> parts;
    for (const auto& path : config.input) {
        auto cloud = config.input_format == "auto" ? load_cloud(path)
                                                   : load_cloud(path, format_from_name(config.input_format));
        parts.push_back(cloud.without_labels());
    }
    return concatenate(parts).with_schema(ClassSchema::builtin(config.schema));
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string utc_now() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

struct SegmentOutput {
    SegmentRecord record;
    std::optional<PointCloud> sampled;  ///< with predicted labels
    double seconds = 0.0;
};

/// Removes artifacts of a previous run in the same directory.
void reset_run_dir(const fs::path& out) {
    fs::create_directories(out);
    fs::remove_all(out / "segments");
    for (const char* name : {run_layout::kReviewedReport, run_layout::kEvaluation, run_layout::kReconstructed}) {
        fs::remove(out / name);
    }
    fs::create_directories(out / "segments");
}

}  // namespace

RunManifest run_inspection(const RunConfig& config) {
    config.validate();
    const auto run_start = Clock::now();
    const auto started_at = utc_now();
    nlohmann::json stages = nlohmann::json::object();
    const auto schema = ClassSchema::builtin(config.schema);

    RunManifest manifest;
    manifest.tool_version = std::string(tool_version());
    manifest.config = config.to_json(false);
    manifest.schema = schema->to_json();
    manifest.reconstruction_mode = std::string(to_string(config.label_propagation));
    for (const auto& p : config.input) manifest.input_paths.push_back(p.generic_string());

    auto t0 = Clock::now();
    const PointCloud input = load_inputs(config);
    manifest.input_sha256 = sha256_files(config.input);
    manifest.input_point_count = input.size();
    stages["ingest"] = seconds_since(t0);

    t0 = Clock::now();
    const bool heuristic = config.predictor == PredictorKind::heuristic;
    Mask ground;
    if (config.remove_ground || heuristic) ground = filter_ground(input, config.ground_filter);
    manifest.ground_removed = config.remove_ground;
    manifest.ground_point_count = static_cast<std::size_t>(std::count(ground.begin(), ground.end(), 1));
    std::optional<GroundReference> reference;
    if (heuristic) reference.emplace(input.positions(), ground, config.heuristic.reference_cell);

    std::vector<std::size_t> working;
    working.reserve(input.size());
    for (std::size_t i = 0; i < input.size(); ++i) {
        if (!config.remove_ground || !ground[i]) working.push_back(i);
    }
    const PointCloud work = config.remove_ground ? input.subset(working) : input;
    stages["ground"] = seconds_since(t0);

    t0 = Clock::now();
    if (work.size() < 2) throw DataError("input has fewer than 2 points to partition");
    manifest.axis = estimate_corridor_axis(work);
    const auto segments =
        partition_corridor(work, manifest.axis, {config.segment_length, config.min_segment_points});
    stages["partition"] = seconds_since(t0);

    reset_run_dir(config.out);

    t0 = Clock::now();
    std::vector<SegmentOutput> outputs(segments.size());
    detail::parallel_for(segments.size(), config.parallelism, [&](std::size_t s) {
        const auto seg_start = Clock::now();
        const auto& seg = segments[s];
        auto& out = outputs[s];
        auto& rec = out.record;
        rec.segment_id = seg.segment_id;
        rec.t_start = seg.t_start;
        rec.t_end = seg.t_end;
        rec.point_count = seg.point_indices.size();
        rec.member_indices.reserve(seg.point_indices.size());
        for (auto i : seg.point_indices) rec.member_indices.push_back(working[i]);
        try {
            const PointCloud members = input.subset(rec.member_indices);
            const auto sample = farthest_point_sample(members, config.fps_budget, config.fps_seed % members.size());
            auto local = sample.indices;
            std::sort(local.begin(), local.end());
            rec.coverage_radius = sample.coverage_radius;
            PointCloud sampled = members.subset(local);
            std::vector<std::size_t> sampled_source(local.size());
            for (std::size_t j = 0; j < local.size(); ++j) sampled_source[j] = rec.member_indices[local[j]];
            if (config.estimate_normals) sampled = sampled.with_normals(estimate_normals(sampled, config.normal_k).as_float());

            SoftmaxPrediction prediction;
            if (heuristic) {
                Mask sampled_ground(sampled.size(), 0);
                if (!config.remove_ground) {
                    for (std::size_t j = 0; j < sampled.size(); ++j) sampled_ground[j] = ground[sampled_source[j]];
                }
                prediction = predict_heuristic(sampled, sampled_ground, *reference, schema, config.heuristic);
            } else {
                const auto path = prediction_path(config.prediction_pattern, seg.segment_id);
                if (!fs::exists(path)) throw DataError("prediction file missing: " + path.string());
                prediction = load_predictions(path, sampled, schema);
            }

            const auto report = flag_segment(seg.segment_id, sampled.positions(), prediction, config.flag_policy);
            sampled = sampled.with_labels(argmax_labels(prediction));

            const auto rel = run_layout::segment_dir(seg.segment_id);
            fs::create_directories(config.out / rel);
            write_file(config.out / rel / run_layout::kPoints, write_ply(sampled, PlyEncoding::binary_little_endian));
            write_predictions(config.out / rel / run_layout::kPredictions, prediction);
            write_file(config.out / rel / run_layout::kFlags, dump_document(report.to_json()));

            rec.sampled_count = sampled.size();
            rec.sampled_indices = std::move(sampled_source);
            rec.flagged = report.flagged;
            rec.undecided_count = report.undecided_count;
            rec.cluster_count = report.clusters.size();
            rec.points_file = (rel / run_layout::kPoints).generic_string();
            rec.predictions_file = (rel / run_layout::kPredictions).generic_string();
            rec.flags_file = (rel / run_layout::kFlags).generic_string();
            out.sampled = std::move(sampled);
        } catch (const std::exception& e) {
            rec.status = "error";
            rec.error = e.what();
            rec.sampled_count = 0;
            rec.sampled_indices.clear();
            rec.flagged = false;
            rec.undecided_count = 0;
            rec.cluster_count = 0;
            rec.points_file.clear();
            rec.predictions_file.clear();
            rec.flags_file.clear();
            out.sampled.reset();
            std::error_code ec;
            fs::remove_all(config.out / run_layout::segment_dir(seg.segment_id), ec);
        }
        out.seconds = seconds_since(seg_start);
    });
    stages["segments"] = seconds_since(t0);

    nlohmann::json segment_seconds = nlohmann::json::array();
    for (auto& o : outputs) {
        if (!o.record.ok()) manifest.complete = false;
        segment_seconds.push_back(o.seconds);
    }

    t0 = Clock::now();
    std::vector<PointCloud> parts;
    for (const auto& o : outputs) {
        if (o.sampled) parts.push_back(*o.sampled);
    }
    if (!parts.empty()) {
        PointCloud reconstructed;
        if (config.label_propagation == LabelPropagation::subsample_only) {
            reconstructed = concatenate(parts);
        } else {
            std::vector<std::pair<std::size_t, ClassId>> picks;
            for (const auto& o : outputs) {
                if (!o.sampled) continue;
                const auto labels = o.sampled->labels();
                for (std::size_t j = 0; j < labels.size(); ++j) picks.emplace_back(o.record.sampled_indices[j], labels[j]);
            }
            std::sort(picks.begin(), picks.end());
            std::vector<std::size_t> idx(picks.size());
            std::vector<ClassId> lab(picks.size());
            for (std::size_t j = 0; j < picks.size(); ++j) std::tie(idx[j], lab[j]) = picks[j];
            auto labels = propagate_labels(input, idx, lab);
            // Removed terrain keeps its ground label instead of inheriting one.
            if (config.remove_ground) {
                if (const auto g = schema->find("ground")) {
                    for (std::size_t i = 0; i < labels.size(); ++i) {
                        if (ground[i]) labels[i] = *g;
                    }
                }
            }
            reconstructed = input.with_labels(std::move(labels));
        }
        write_file(config.out / run_layout::kReconstructed, write_ply(reconstructed, PlyEncoding::binary_little_endian));
        manifest.reconstruction_file = run_layout::kReconstructed;
        manifest.reconstructed_count = reconstructed.size();
    }
    stages["reconstruction"] = seconds_since(t0);

    for (auto& o : outputs) manifest.segments.push_back(std::move(o.record));

    write_file(config.out / run_layout::kReport, dump_document(flag_summary(manifest)));
    write_file(config.out / run_layout::kReviews, "");
    manifest.timing = {{"started_at", started_at},
                       {"stages", stages},
                       {"segment_seconds", segment_seconds},
                       {"total_seconds", seconds_since(run_start)}};
    write_file(config.out / run_layout::kManifest, dump_document(manifest.to_json()));
    return manifest;
}

nlohmann::json IngestSummary::to_json() const {
    return {{"cache", cache_path.generic_string()}, {"point_count", point_count}, {"sha256", sha256}};
}

IngestSummary ingest(const fs::path& input, const std::string& format, const fs::path& out_dir) {
    const auto cloud = format == "auto" ? load_cloud(input) : load_cloud(input, format_from_name(format));
    IngestSummary s;
    s.cache_path = out_dir / "cloud.gsc";
    s.point_count = cloud.size();
    s.sha256 = sha256_files(std::span(&input, 1));
    write_cache(cloud, s.cache_path);
    write_file(out_dir / "ingest.json", dump_document(s.to_json()));
    return s;
}

}  // namespace gridscan
