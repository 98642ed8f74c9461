// SPDX-FileCopyrightText: 2026 The gridscan authors
// SPDX-License-Identifier: Apache-2.0

#include "gridscan/pipeline/evaluate.hpp"

#include "gridscan/cloud/formats.hpp"
#include "gridscan/error.hpp"
#include "gridscan/pipeline/report.hpp"

namespace gridscan {

namespace fs = std::filesystem;

namespace {

std::vector<ClassId> emitted_labels(const fs::path& run_dir, const std::string& file, std::size_t expected,
                                   const std::shared_ptr<const ClassSchema>& schema) {
    const auto cloud = parse_ply(read_file(run_dir / file), schema).cloud;
    if (!cloud.has_labels()) throw DataError(file + " carries no labels");
    if (cloud.size() != expected) {
        throw DataError(file + ": " + std::to_string(cloud.size()) + " points, manifest records " +
                        std::to_string(expected));
    }
    return {cloud.labels().begin(), cloud.labels().end()};
}

}  // namespace

ConfusionMatrix run_confusion(const fs::path& run_dir, std::span<const ClassId> truth, const std::set<ClassId>& ignore) {
    const auto manifest = load_manifest(run_dir);
    const auto schema = std::make_shared<const ClassSchema>(ClassSchema::from_json(manifest.schema));
    if (truth.size() != manifest.input_point_count) {
        throw DataError("truth has " + std::to_string(truth.size()) + " labels but the run input has " +
                        std::to_string(manifest.input_point_count) + " points");
    }
    ConfusionMatrix cm(schema);
    if (manifest.reconstruction_mode == "full_cloud" && !manifest.reconstruction_file.empty()) {
        const auto predicted =
            emitted_labels(run_dir, manifest.reconstruction_file, manifest.reconstructed_count, schema);
        if (predicted.size() != truth.size()) throw DataError("reconstructed cloud does not cover the input");
        cm.accumulate(truth, predicted, ignore);
        return cm;
    }
    std::vector<ClassId> t;
    for (const auto& seg : manifest.segments) {
        if (!seg.ok()) continue;
        const auto predicted = emitted_labels(run_dir, seg.points_file, seg.sampled_count, schema);
        t.resize(seg.sampled_indices.size());
        for (std::size_t j = 0; j < t.size(); ++j) t[j] = truth[seg.sampled_indices[j]];
        cm.accumulate(t, predicted, ignore);
    }
    return cm;
}

ClassReport evaluate(const fs::path& run_dir, std::span<const ClassId> truth, std::vector<double> betas,
                     const std::set<ClassId>& ignore) {
    const auto cm = run_confusion(run_dir, truth, ignore);
    const auto manifest = load_manifest(run_dir);
    const auto model = manifest.config.at("predictor").value("kind", std::string("model"));
    auto report = make_report(cm, std::move(betas), ignore, model);
    write_file(run_dir / run_layout::kEvaluation, dump_document(report.to_json()));
    return report;
}

std::vector<ClassId> load_truth_labels(const fs::path& path) {
    const auto cloud = load_cloud(path);
    if (!cloud.has_labels()) throw DataError(path.string() + " has no labels");
    return {cloud.labels().begin(), cloud.labels().end()};
}

}  // namespace gridscan
