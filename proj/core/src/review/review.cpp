// SPDX-FileCopyrightText: 2026 The gridscan authors
// SPDX-License-Identifier: Apache-2.0

#include "gridscan/review/review.hpp"

#include <chrono>
#include <ctime>
#include <fstream>

#include "detail/byte_io.hpp"
#include "gridscan/cloud/formats.hpp"
#include "gridscan/flagging/flagging.hpp"
#include "gridscan/pipeline/report.hpp"
#include "gridscan/predictor/softmax_prediction.hpp"

namespace gridscan {

namespace fs = std::filesystem;

std::string_view to_string(Verdict v) {
    switch (v) {
        case Verdict::confirm_flag: return "confirm_flag";
        case Verdict::dismiss_flag: return "dismiss_flag";
        case Verdict::relabel: return "relabel";
    }
    return "confirm_flag";
}

Verdict verdict_from_string(std::string_view s) {
    if (s == "confirm_flag") return Verdict::confirm_flag;
    if (s == "dismiss_flag") return Verdict::dismiss_flag;
    if (s == "relabel") return Verdict::relabel;
    throw ValidationError("unknown verdict '" + std::string(s) + "'");
}

nlohmann::json ReviewDecision::to_json() const {
    nlohmann::json j = {{"segment_id", segment_id},
                        {"verdict", std::string(to_string(verdict))},
                        {"reviewer", reviewer},
                        {"timestamp", timestamp},
                        {"notes", notes}};
    if (verdict == Verdict::relabel) {
        nlohmann::json r = nlohmann::json::array();
        for (const auto& x : relabels) r.push_back({{"index", x.point_index}, {"class", x.class_id}});
        j["relabels"] = r;
    }
    return j;
}

ReviewDecision ReviewDecision::from_json(const nlohmann::json& j, const ClassSchema* schema) {
    if (!j.is_object()) throw ValidationError("review decision must be a JSON object");
    ReviewDecision d;
    try {
        d.segment_id = j.at("segment_id").get<std::size_t>();
        d.verdict = verdict_from_string(j.at("verdict").get<std::string>());
        d.reviewer = j.value("reviewer", std::string());
        d.timestamp = j.value("timestamp", std::string());
        d.notes = j.value("notes", std::string());
        if (j.contains("relabels") && !j.at("relabels").is_null()) {
            for (const auto& r : j.at("relabels")) {
                Relabel x;
                x.point_index = r.at("index").get<std::size_t>();
                const auto& c = r.at("class");
                if (c.is_string()) {
                    if (!schema) throw ValidationError("class names need a schema");
                    const auto id = schema->find(c.get<std::string>());
                    if (!id) throw ValidationError("unknown class '" + c.get<std::string>() + "'");
                    x.class_id = *id;
                } else {
                    const auto v = c.get<std::int64_t>();
                    if (v < 0 || v > 255) throw ValidationError("class id " + std::to_string(v) + " out of range");
                    x.class_id = static_cast<ClassId>(v);
                }
                d.relabels.push_back(x);
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed review decision: ") + e.what());
    }
    return d;
}

namespace {

std::string utc_now() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::vector<std::string> log_lines(const fs::path& path) {
    std::vector<std::string> lines;
    std::ifstream in(path);
    for (std::string line; std::getline(in, line);) {
        if (!detail::trim(line).empty()) lines.push_back(line);
    }
    return lines;
}

/// In-memory replay shared by the service and apply_reviews.
ReviewedRun replay(const fs::path& run_dir, nlohmann::json report, const std::vector<ReviewDecision>& log,
                   const std::shared_ptr<const ClassSchema>& schema, bool load_labels) {
    ReviewedRun out;
    std::map<std::size_t, std::map<std::size_t, ClassId>> overrides;
    auto& segments = report.at("segments");
    auto find = [&](std::size_t id) -> nlohmann::json* {
        for (auto& s : segments) {
            if (s.at("segment_id").get<std::size_t>() == id) return &s;
        }
        return nullptr;
    };
    for (const auto& d : log) {
        auto* s = find(d.segment_id);
        if (!s) throw DataError("review log names unknown segment " + std::to_string(d.segment_id));
        (*s)["reviewed"] = true;
        (*s)["verdict"] = std::string(to_string(d.verdict));
        if (d.verdict == Verdict::dismiss_flag) (*s)["flagged"] = false;
        if (d.verdict == Verdict::confirm_flag) (*s)["flagged"] = true;
        for (const auto& r : d.relabels) overrides[d.segment_id][r.point_index] = r.class_id;
    }
    for (const auto& [id, map] : overrides) {
        auto* s = find(id);
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& [index, cls] : map) arr.push_back({{"index", index}, {"class", cls}});
        (*s)["relabels"] = arr;
    }
    std::size_t flagged = 0;
    for (const auto& s : segments) flagged += s.at("flagged").get<bool>() ? 1 : 0;
    report["flagged_count"] = flagged;
    report["reviews_applied"] = log.size();
    out.report = std::move(report);

    if (load_labels && !overrides.empty()) {
        const auto manifest = load_manifest(run_dir);
        for (const auto& [id, map] : overrides) {
            for (const auto& rec : manifest.segments) {
                if (rec.segment_id != id || !rec.ok()) continue;
                const auto cloud = parse_ply(read_file(run_dir / rec.points_file), schema).cloud;
                std::vector<ClassId> labels(cloud.labels().begin(), cloud.labels().end());
                for (const auto& [index, cls] : map) {
                    if (index < labels.size()) labels[index] = cls;
                }
                out.labels[id] = std::move(labels);
            }
        }
    }
    return out;
}

nlohmann::json read_report(const fs::path& run_dir) {
    const auto path = run_dir / run_layout::kReport;
    if (!fs::exists(path)) throw NotFoundError("no report in " + run_dir.string());
    try {
        return nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw DataError("report " + path.string() + ": " + e.what());
    }
}

}  // namespace

std::vector<ReviewDecision> read_review_log(const fs::path& run_dir) {
    std::vector<ReviewDecision> log;
    std::size_t line_no = 0;
    for (const auto& line : log_lines(run_dir / run_layout::kReviews)) {
        ++line_no;
        try {
            log.push_back(ReviewDecision::from_json(nlohmann::json::parse(line)));
        } catch (const std::exception& e) {
            throw ParseError(line_no, std::string("review log: ") + e.what());
        }
    }
    return log;
}

ReviewedRun apply_reviews(const fs::path& run_dir) {
    const auto manifest = load_manifest(run_dir);
    const auto schema = std::make_shared<const ClassSchema>(ClassSchema::from_json(manifest.schema));
    auto result = replay(run_dir, read_report(run_dir), read_review_log(run_dir), schema, true);
    write_file(run_dir / run_layout::kReviewedReport, dump_document(result.report));
    return result;
}

ReviewService::ReviewService(fs::path run_dir) : run_dir_(std::move(run_dir)) {
    if (fs::exists(run_dir_ / run_layout::kManifest)) {
        manifest_ = load_manifest(run_dir_);
        schema_ = std::make_shared<const ClassSchema>(ClassSchema::from_json(manifest_->schema));
    }
    next_seq_ = log_lines(run_dir_ / run_layout::kReviews).size() + 1;
}

const SegmentRecord& ReviewService::record(std::size_t segment_id) const {
    if (manifest_) {
        for (const auto& r : manifest_->segments) {
            if (r.segment_id == segment_id && r.ok()) return r;
        }
    }
    throw NotFoundError("unknown segment " + std::to_string(segment_id));
}

nlohmann::json ReviewService::list_segments(bool flagged_only) const {
    nlohmann::json out = nlohmann::json::array();
    if (!manifest_) return out;
    const auto original = read_report(run_dir_);
    std::vector<ReviewDecision> log;
    {
        std::lock_guard lock(log_mutex_);
        log = read_review_log(run_dir_);
    }
    const auto revised = replay(run_dir_, original, log, schema_, false).report;
    const auto& before = original.at("segments");
    const auto& after = revised.at("segments");
    for (std::size_t i = 0; i < after.size(); ++i) {
        const bool pipeline_flagged = before[i].at("flagged").get<bool>();
        if (flagged_only && !pipeline_flagged) continue;
        auto s = after[i];
        s.erase("relabels");
        s["pipeline_flagged"] = pipeline_flagged;
        out.push_back(std::move(s));
    }
    return out;
}

SegmentPayload ReviewService::get_segment_payload(std::size_t segment_id) const {
    const auto& rec = record(segment_id);
    const auto cloud = parse_ply(read_file(run_dir_ / rec.points_file), schema_).cloud;
    const auto prediction = load_predictions(run_dir_ / rec.predictions_file, cloud, schema_);
    const auto flags = nlohmann::json::parse(read_file(run_dir_ / rec.flags_file));
    if (!cloud.has_labels()) throw DataError(rec.points_file + " carries no labels");

    const std::size_t n = cloud.size();
    const Vec3 offset = n ? cloud.centroid() : Vec3::Zero();
    SegmentPayload p;
    p.binary.reserve(12 * n + n + 3 + 4 * n);
    for (const auto& v : cloud.positions()) {
        for (int a = 0; a < 3; ++a) detail::put_le(p.binary, static_cast<float>(v[a] - offset[a]));
    }
    const std::size_t labels_offset = p.binary.size();
    for (auto l : cloud.labels()) p.binary.push_back(static_cast<char>(l));
    while (p.binary.size() % 4 != 0) p.binary.push_back('\0');
    const std::size_t margins_offset = p.binary.size();
    for (std::size_t i = 0; i < n; ++i) detail::put_le(p.binary, static_cast<float>(margin(prediction.row(i))));

    p.envelope = {{"segment_id", segment_id},
                  {"point_count", n},
                  {"t_start", rec.t_start},
                  {"t_end", rec.t_end},
                  {"offset", {offset.x(), offset.y(), offset.z()}},
                  {"schema", schema_->to_json()},
                  {"policy", manifest_->config.value("flag_policy", nlohmann::json::object())},
                  {"flag_report", flags},
                  {"clusters", flags.value("clusters", nlohmann::json::array())},
                  {"byte_order", "little"},
                  {"blocks",
                   {{"positions", {{"offset", 0}, {"bytes", 12 * n}, {"type", "float32"}, {"components", 3}}},
                    {"labels", {{"offset", labels_offset}, {"bytes", n}, {"type", "uint8"}, {"components", 1}}},
                    {"margins", {{"offset", margins_offset}, {"bytes", 4 * n}, {"type", "float32"}, {"components", 1}}}}},
                  {"total_bytes", p.binary.size()}};
    return p;
}

void ReviewService::validate(const ReviewDecision& d) const {
    const auto& rec = record(d.segment_id);
    if (d.verdict == Verdict::relabel) {
        if (d.relabels.empty()) throw ValidationError("relabel verdict needs at least one relabel");
        for (const auto& r : d.relabels) {
            if (r.point_index >= rec.sampled_count) {
                throw ValidationError("point index " + std::to_string(r.point_index) + " out of range for segment " +
                                      std::to_string(d.segment_id) + " (" + std::to_string(rec.sampled_count) +
                                      " points)");
            }
            if (!schema_->contains(r.class_id)) {
                throw ValidationError("class id " + std::to_string(r.class_id) + " not in schema " + schema_->name());
            }
        }
    } else if (!d.relabels.empty()) {
        throw ValidationError("relabels are only allowed with the relabel verdict");
    }
}

ReviewAck ReviewService::post_review(ReviewDecision d) {
    validate(d);
    if (d.timestamp.empty()) d.timestamp = utc_now();
    std::lock_guard lock(log_mutex_);
    auto j = d.to_json();
    j["seq"] = next_seq_;
    const auto line = j.dump() + "\n";
    std::ofstream out(run_dir_ / run_layout::kReviews, std::ios::binary | std::ios::app);
    out.write(line.data(), static_cast<std::streamsize>(line.size()));
    out.flush();
    if (!out) throw std::runtime_error("cannot append to the review log");
    return {next_seq_++, d.segment_id};
}

nlohmann::json ReviewService::report() const { return read_report(run_dir_); }

nlohmann::json ReviewService::reviewed_report() const {
    std::lock_guard lock(log_mutex_);
    return apply_reviews(run_dir_).report;
}

}  // namespace gridscan
