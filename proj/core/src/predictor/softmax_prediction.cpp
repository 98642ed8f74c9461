// SPDX-FileCopyrightText: 2026 The gridscan authors
// SPDX-License-Identifier: Apache-2.0

#include "gridscan/predictor/softmax_prediction.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "../detail/byte_io.hpp"
#include "gridscan/cloud/formats.hpp"
#include "gridscan/error.hpp"

namespace gridscan {

namespace {

constexpr double kRenormalizeLimit = 1e-3;

double row_sum(std::span<const float> row) {
    double s = 0.0;
    for (float v : row) s += v;
    return s;
}

}  // namespace

SoftmaxPrediction::SoftmaxPrediction(std::vector<float> probs, std::shared_ptr<const ClassSchema> schema)
    : probs_(std::move(probs)), schema_(std::move(schema)) {
    if (!schema_) throw std::invalid_argument("prediction requires a class schema");
    classes_ = schema_->size();
    if (probs_.size() % classes_ != 0) {
        throw DataError("probability matrix size " + std::to_string(probs_.size()) + " is not a multiple of " +
                        std::to_string(classes_) + " classes");
    }
    for (std::size_t i = 0; i < size(); ++i) {
        const auto r = row(i);
        for (float v : r) {
            if (!(v >= 0.0f && v <= 1.0f)) {
                throw DataError("probability outside [0, 1] in row " + std::to_string(i));
            }
        }
        if (std::abs(row_sum(r) - 1.0) > kRowTolerance) {
            throw DataError("probability row " + std::to_string(i) + " does not sum to 1");
        }
    }
}

SoftmaxPrediction SoftmaxPrediction::subset(std::span<const std::size_t> indices) const {
    std::vector<float> out;
    out.reserve(indices.size() * classes_);
    for (auto i : indices) {
        if (i >= size()) throw std::out_of_range("prediction subset index out of range");
        const auto r = row(i);
        out.insert(out.end(), r.begin(), r.end());
    }
    return SoftmaxPrediction(std::move(out), schema_);
}

bool operator==(const SoftmaxPrediction& a, const SoftmaxPrediction& b) {
    if (a.classes_ != b.classes_ || a.probs_.size() != b.probs_.size()) return false;
    if (static_cast<bool>(a.schema_) != static_cast<bool>(b.schema_)) return false;
    if (a.schema_ && !(*a.schema_ == *b.schema_)) return false;
    return a.probs_.empty() || std::memcmp(a.probs_.data(), b.probs_.data(), a.probs_.size() * sizeof(float)) == 0;
}

ClassId argmax(std::span<const float> row) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < row.size(); ++c) {
        if (row[c] > row[best]) best = c;
    }
    return static_cast<ClassId>(best);
}

std::vector<ClassId> argmax_labels(const SoftmaxPrediction& prediction) {
    std::vector<ClassId> labels(prediction.size());
    for (std::size_t i = 0; i < prediction.size(); ++i) labels[i] = argmax(prediction.row(i));
    return labels;
}

SoftmaxPrediction softmax_rows(std::span<const double> scores, double temperature,
                               std::shared_ptr<const ClassSchema> schema) {
    if (!(temperature > 0.0)) throw std::invalid_argument("softmax temperature must be positive");
    if (!schema) throw std::invalid_argument("softmax_rows requires a schema");
    const std::size_t c = schema->size();
    if (scores.size() % c != 0) throw std::invalid_argument("score matrix does not match schema class count");
    std::vector<float> probs(scores.size());
    std::vector<double> e(c);
    for (std::size_t r = 0; r < scores.size() / c; ++r) {
        const double* s = scores.data() + r * c;
        const double top = *std::max_element(s, s + c);
        double total = 0.0;
        for (std::size_t k = 0; k < c; ++k) {
            e[k] = std::exp((s[k] - top) / temperature);
            total += e[k];
        }
        for (std::size_t k = 0; k < c; ++k) probs[r * c + k] = static_cast<float>(e[k] / total);
    }
    return SoftmaxPrediction(std::move(probs), std::move(schema));
}

PredictionHeader read_prediction_header(std::string_view bytes) {
    const auto eol = bytes.find('\n');
    if (eol == std::string_view::npos) throw DataError("prediction file has no JSON header line");
    PredictionHeader h;
    try {
        const auto j = nlohmann::json::parse(bytes.substr(0, eol));
        h.n = j.at("n").get<std::size_t>();
        h.c = j.at("c").get<std::size_t>();
        h.classes = j.at("classes").get<std::vector<std::string>>();
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("prediction header is malformed: ") + e.what());
    }
    if (h.classes.size() != h.c) throw DataError("prediction header lists " + std::to_string(h.classes.size()) +
                                                 " class names for c=" + std::to_string(h.c));
    h.payload_offset = eol + 1;
    return h;
}

std::string encode_predictions(const SoftmaxPrediction& prediction) {
    nlohmann::ordered_json header;
    header["n"] = prediction.size();
    header["c"] = prediction.classes();
    header["classes"] = prediction.schema() ? prediction.schema()->class_names() : std::vector<std::string>{};
    std::string out = header.dump();
    out.push_back('\n');
    out.reserve(out.size() + prediction.data().size() * sizeof(float));
    for (float v : prediction.data()) detail::put_le(out, v);
    return out;
}

SoftmaxPrediction decode_predictions(std::string_view bytes, std::size_t expected_points,
                                     std::shared_ptr<const ClassSchema> schema) {
    if (!schema) throw std::invalid_argument("decode_predictions requires a schema");
    const auto h = read_prediction_header(bytes);
    if (h.n != expected_points) {
        throw DataError("prediction file has n=" + std::to_string(h.n) + " rows but the cloud has " +
                        std::to_string(expected_points) + " points");
    }
    if (h.classes != schema->class_names()) {
        throw DataError("prediction class names do not match schema " + schema->name());
    }
    const std::size_t expected_bytes = h.n * h.c * sizeof(float);
    const std::size_t actual = bytes.size() - h.payload_offset;
    if (actual < expected_bytes) throw TruncatedError(expected_bytes, actual, "prediction payload truncated");
    if (actual > expected_bytes) {
        throw DataError("prediction payload has " + std::to_string(actual - expected_bytes) + " trailing bytes");
    }

    std::vector<float> probs(h.n * h.c);
    const char* p = bytes.data() + h.payload_offset;
    for (std::size_t i = 0; i < probs.size(); ++i) probs[i] = detail::get_le<float>(p + i * sizeof(float));

    for (std::size_t r = 0; r < h.n; ++r) {
        float* row = probs.data() + r * h.c;
        for (std::size_t k = 0; k < h.c; ++k) {
            if (!std::isfinite(row[k]) || row[k] < 0.0f) {
                throw DataError("prediction row " + std::to_string(r) + " has a negative or non-finite entry");
            }
        }
        const double sum = row_sum({row, h.c});
        const double off = std::abs(sum - 1.0);
        if (off > kRenormalizeLimit) {
            throw DataError("prediction row " + std::to_string(r) + " sums to " + std::to_string(sum) +
                            " (wrong file or corrupt payload)");
        }
        if (off > SoftmaxPrediction::kRowTolerance) {
            for (std::size_t k = 0; k < h.c; ++k) row[k] = static_cast<float>(row[k] / sum);
        }
    }
    return SoftmaxPrediction(std::move(probs), std::move(schema));
}

SoftmaxPrediction load_predictions(const std::filesystem::path& path, const PointCloud& cloud,
                                   std::shared_ptr<const ClassSchema> schema) {
    return decode_predictions(read_file(path), cloud.size(), std::move(schema));
}

void write_predictions(const std::filesystem::path& path, const SoftmaxPrediction& prediction) {
    write_file(path, encode_predictions(prediction));
}

SoftmaxPrediction parse_probability_text(std::string_view text, std::shared_ptr<const ClassSchema> schema) {
    if (!schema) throw std::invalid_argument("parse_probability_text requires a schema");
    std::vector<float> probs;
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto eol = text.find('\n');
        auto line = detail::trim(text.substr(0, eol));
        text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
        ++line_no;
        if (line.empty() || line.front() == '#') continue;
        std::size_t count = 0;
        while (!line.empty()) {
            std::size_t end = 0;
            while (end < line.size() && line[end] != ' ' && line[end] != '\t' && line[end] != ',') ++end;
            const auto token = line.substr(0, end);
            line.remove_prefix(std::min(line.size(), end + 1));
            line = detail::trim(line);
            if (token.empty()) continue;
            float v = 0.0f;
            if (!detail::parse_number(token, v)) throw ParseError(line_no, "bad probability '" + std::string(token) + "'");
            probs.push_back(v);
            ++count;
        }
        if (count != schema->size()) {
            throw ParseError(line_no, "expected " + std::to_string(schema->size()) + " probabilities, got " +
                                          std::to_string(count));
        }
    }
    // Route through the binary decoder so exported files obey the same rules.
    const std::size_t n = probs.size() / schema->size();
    nlohmann::ordered_json header{{"n", n}, {"c", schema->size()}, {"classes", schema->class_names()}};
    std::string bytes = header.dump() + "\n";
    for (float v : probs) detail::put_le(bytes, v);
    return decode_predictions(bytes, n, std::move(schema));
}

}  // namespace gridscan
