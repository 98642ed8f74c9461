// SPDX-FileCopyrightText: 2026 The gridscan authors
// SPDX-License-Identifier: Apache-2.0

#include "gridscan/pipeline/config.hpp"

#include <set>
#include <stdexcept>

#include "gridscan/cloud/class_schema.hpp"
#include "gridscan/cloud/formats.hpp"
#include "gridscan/error.hpp"

namespace gridscan {

namespace {

void reject_unknown(const nlohmann::json& j, const std::set<std::string>& known, const char* where) {
    if (!j.is_object()) throw std::invalid_argument(std::string(where) + " must be a JSON object");
    for (const auto& [key, _] : j.items()) {
        if (!known.count(key)) throw std::invalid_argument(std::string("unknown ") + where + " key '" + key + "'");
    }
}

std::filesystem::path resolve(const std::filesystem::path& p, const std::filesystem::path& base) {
    if (p.empty() || p.is_absolute() || base.empty()) return p;
    return base / p;
}

}  // namespace

nlohmann::json to_json(const PredictorParams& p) {
    return {{"ground_band", p.ground_band},
            {"low_veg_band", p.low_veg_band},
            {"med_veg_band", p.med_veg_band},
            {"line_height_min", p.line_height_min},
            {"linearity_threshold", p.linearity_threshold},
            {"verticality_threshold", p.verticality_threshold},
            {"temperature", p.temperature},
            {"k_neighbors", p.k_neighbors},
            {"neighbor_radius", p.neighbor_radius},
            {"line_max_slope", p.line_max_slope},
            {"reference_cell", p.reference_cell},
            {"column_cell", p.column_cell},
            {"slice_height", p.slice_height},
            {"vertical_run_min", p.vertical_run_min},
            {"band_softness", p.band_softness},
            {"noise_floor", p.noise_floor}};
}

PredictorParams predictor_params_from_json(const nlohmann::json& j) {
    PredictorParams p;
    reject_unknown(j, {"ground_band", "low_veg_band", "med_veg_band", "line_height_min", "linearity_threshold",
                       "verticality_threshold", "temperature", "k_neighbors", "neighbor_radius", "line_max_slope",
                       "reference_cell", "column_cell", "slice_height", "vertical_run_min", "band_softness",
                       "noise_floor"},
                   "heuristic");
    p.ground_band = j.value("ground_band", p.ground_band);
    p.low_veg_band = j.value("low_veg_band", p.low_veg_band);
    p.med_veg_band = j.value("med_veg_band", p.med_veg_band);
    p.line_height_min = j.value("line_height_min", p.line_height_min);
    p.linearity_threshold = j.value("linearity_threshold", p.linearity_threshold);
    p.verticality_threshold = j.value("verticality_threshold", p.verticality_threshold);
    p.temperature = j.value("temperature", p.temperature);
    p.k_neighbors = j.value("k_neighbors", p.k_neighbors);
    p.neighbor_radius = j.value("neighbor_radius", p.neighbor_radius);
    p.line_max_slope = j.value("line_max_slope", p.line_max_slope);
    p.reference_cell = j.value("reference_cell", p.reference_cell);
    p.column_cell = j.value("column_cell", p.column_cell);
    p.slice_height = j.value("slice_height", p.slice_height);
    p.vertical_run_min = j.value("vertical_run_min", p.vertical_run_min);
    p.band_softness = j.value("band_softness", p.band_softness);
    p.noise_floor = j.value("noise_floor", p.noise_floor);
    return p;
}

std::string_view to_string(LabelPropagation mode) {
    return mode == LabelPropagation::full_cloud ? "full_cloud" : "subsample_only";
}

std::filesystem::path prediction_path(const std::string& pattern, std::size_t segment_id) {
    std::string out = pattern;
    const std::string id = std::to_string(segment_id);
    for (auto pos = out.find("{id}"); pos != std::string::npos; pos = out.find("{id}", pos + id.size())) {
        out.replace(pos, 4, id);
    }
    return out;
}

void RunConfig::validate() const {
    if (input.empty()) throw std::invalid_argument("config: no input given");
    if (input_format != "auto") format_from_name(input_format);
    ClassSchema::builtin(schema);
    if (!(segment_length > 0.0)) throw std::invalid_argument("config: segment_length must be positive");
    if (fps_budget == 0) throw std::invalid_argument("config: fps_budget must be positive");
    if (predictor == PredictorKind::file && prediction_pattern.empty()) {
        throw std::invalid_argument("config: file predictor needs a path pattern");
    }
    if (!(heuristic.temperature > 0.0)) throw std::invalid_argument("config: temperature must be positive");
    if (heuristic.k_neighbors < 3) throw std::invalid_argument("config: k_neighbors must be at least 3");
    if (!(ground_filter.cell_size > 0.0)) throw std::invalid_argument("config: ground cell_size must be positive");
    if (estimate_normals && normal_k < 3) throw std::invalid_argument("config: normal_k must be at least 3");
    flag_policy.validate();
    if (out.empty()) throw std::invalid_argument("config: no output directory given");
}

nlohmann::json RunConfig::to_json(bool include_out) const {
    nlohmann::json inputs = nlohmann::json::array();
    for (const auto& p : input) inputs.push_back(p.generic_string());
    nlohmann::json pred;
    if (predictor == PredictorKind::heuristic) {
        pred = {{"kind", "heuristic"}, {"params", gridscan::to_json(heuristic)}};
    } else {
        pred = {{"kind", "file"}, {"path_pattern", prediction_pattern}};
    }
    nlohmann::json j = {{"input", inputs},
                        {"input_format", input_format},
                        {"schema", schema},
                        {"segment_length", segment_length},
                        {"min_segment_points", min_segment_points},
                        {"fps_budget", fps_budget},
                        {"fps_seed", fps_seed},
                        {"predictor", pred},
                        {"flag_policy", gridscan::to_json(flag_policy)},
                        {"remove_ground", remove_ground},
                        {"ground_filter",
                         {{"cell_size", ground_filter.cell_size}, {"z_tolerance", ground_filter.z_tolerance}}},
                        {"estimate_normals", estimate_normals},
                        {"normal_k", normal_k},
                        {"label_propagation", std::string(to_string(label_propagation))},
                        {"parallelism", parallelism}};
    if (include_out) j["out"] = out.generic_string();
    return j;
}

RunConfig RunConfig::from_json(const nlohmann::json& j, const std::filesystem::path& base_dir) {
    reject_unknown(j,
                   {"input", "input_format", "schema", "segment_length", "min_segment_points", "fps_budget",
                    "fps_seed", "predictor", "flag_policy", "remove_ground", "ground_filter", "estimate_normals",
                    "normal_k", "label_propagation", "out", "parallelism"},
                   "config");
    RunConfig c;
    if (j.contains("input")) {
        const auto& in = j.at("input");
        if (in.is_string()) {
            c.input.push_back(resolve(in.get<std::string>(), base_dir));
        } else {
            for (const auto& p : in) c.input.push_back(resolve(p.get<std::string>(), base_dir));
        }
    }
    c.input_format = j.value("input_format", c.input_format);
    c.schema = j.value("schema", c.schema);
    c.segment_length = j.value("segment_length", c.segment_length);
    c.min_segment_points = j.value("min_segment_points", c.min_segment_points);
    c.fps_budget = j.value("fps_budget", c.fps_budget);
    c.fps_seed = j.value("fps_seed", c.fps_seed);
    if (j.contains("predictor")) {
        const auto& p = j.at("predictor");
        if (p.is_string()) {
            // Shorthand: "heuristic" or a file pattern.
            const auto s = p.get<std::string>();
            if (s == "heuristic") {
                c.predictor = PredictorKind::heuristic;
            } else {
                c.predictor = PredictorKind::file;
                c.prediction_pattern = resolve(s, base_dir).generic_string();
            }
        } else {
            reject_unknown(p, {"kind", "params", "path_pattern"}, "predictor");
            const auto kind = p.value("kind", std::string("heuristic"));
            if (kind == "heuristic") {
                c.predictor = PredictorKind::heuristic;
                if (p.contains("params")) c.heuristic = predictor_params_from_json(p.at("params"));
            } else if (kind == "file") {
                c.predictor = PredictorKind::file;
                c.prediction_pattern = resolve(p.value("path_pattern", std::string()), base_dir).generic_string();
            } else {
                throw std::invalid_argument("unknown predictor kind '" + kind + "'");
            }
        }
    }
    if (j.contains("flag_policy")) c.flag_policy = flag_policy_from_json(j.at("flag_policy"));
    c.remove_ground = j.value("remove_ground", c.remove_ground);
    if (j.contains("ground_filter")) {
        const auto& g = j.at("ground_filter");
        reject_unknown(g, {"cell_size", "z_tolerance"}, "ground_filter");
        c.ground_filter.cell_size = g.value("cell_size", c.ground_filter.cell_size);
        c.ground_filter.z_tolerance = g.value("z_tolerance", c.ground_filter.z_tolerance);
    }
    c.estimate_normals = j.value("estimate_normals", c.estimate_normals);
    c.normal_k = j.value("normal_k", c.normal_k);
    const auto mode = j.value("label_propagation", std::string("subsample_only"));
    if (mode == "subsample_only") {
        c.label_propagation = LabelPropagation::subsample_only;
    } else if (mode == "full_cloud") {
        c.label_propagation = LabelPropagation::full_cloud;
    } else {
        throw std::invalid_argument("unknown label_propagation '" + mode + "'");
    }
    if (j.contains("out")) c.out = resolve(j.at("out").get<std::string>(), base_dir);
    c.parallelism = j.value("parallelism", c.parallelism);
    return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    const auto text = read_file(path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw DataError("config " + path.string() + ": " + e.what());
    }
    return RunConfig::from_json(j, path.parent_path());
}

}  // namespace gridscan
