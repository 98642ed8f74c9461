// SPDX-FileCopyrightText: 2026 The gridscan authors
// SPDX-License-Identifier: Apache-2.0

#include "gridscan/metrics/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <stdexcept>

#include "gridscan/error.hpp"

namespace gridscan {

ConfusionMatrix::ConfusionMatrix(std::shared_ptr<const ClassSchema> schema) : schema_(std::move(schema)) {
    if (!schema_) throw std::invalid_argument("confusion matrix requires a schema");
    classes_ = schema_->size();
    counts_.assign(classes_ * classes_, 0);
}

void ConfusionMatrix::accumulate(std::span<const ClassId> truth, std::span<const ClassId> predicted,
                                 const std::set<ClassId>& ignore) {
    if (truth.size() != predicted.size()) {
        throw std::invalid_argument("accumulate: " + std::to_string(truth.size()) + " truth labels vs " +
                                    std::to_string(predicted.size()) + " predictions");
    }
    std::vector<std::uint8_t> skip(classes_, 0);
    for (auto c : ignore) {
        if (c < classes_) skip[c] = 1;
    }
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (truth[i] >= classes_ || predicted[i] >= classes_) {
            throw DataError("label out of range at point " + std::to_string(i));
        }
        if (skip[truth[i]]) continue;
        ++counts_[truth[i] * classes_ + predicted[i]];
    }
}

ConfusionMatrix& ConfusionMatrix::merge(const ConfusionMatrix& other) {
    if (other.classes_ != classes_) throw std::invalid_argument("cannot merge matrices of different class counts");
    for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
    return *this;
}

std::uint64_t ConfusionMatrix::total() const noexcept {
    return std::accumulate(counts_.begin(), counts_.end(), std::uint64_t{0});
}

std::uint64_t ConfusionMatrix::false_positives(ClassId c) const {
    std::uint64_t col = 0;
    for (std::size_t t = 0; t < classes_; ++t) col += counts_[t * classes_ + c];
    return col - at(c, c);
}

std::uint64_t ConfusionMatrix::false_negatives(ClassId c) const { return support(c) - at(c, c); }

std::uint64_t ConfusionMatrix::support(ClassId c) const {
    std::uint64_t row = 0;
    for (std::size_t p = 0; p < classes_; ++p) row += counts_[c * classes_ + p];
    return row;
}

ConfusionMatrix accumulate(ConfusionMatrix cm, std::span<const ClassId> truth, std::span<const ClassId> predicted,
                           const std::set<ClassId>& ignore) {
    cm.accumulate(truth, predicted, ignore);
    return cm;
}

ConfusionMatrix merge(ConfusionMatrix a, const ConfusionMatrix& b) {
    a.merge(b);
    return a;
}

std::optional<double> iou(const ConfusionMatrix& cm, ClassId c) {
    const auto tp = cm.true_positives(c);
    const auto denom = tp + cm.false_positives(c) + cm.false_negatives(c);
    if (denom == 0) return std::nullopt;
    return static_cast<double>(tp) / static_cast<double>(denom);
}

namespace {

bool excluded(const ConfusionMatrix& cm, ClassId c, const std::set<ClassId>& ignore) {
    return ignore.count(c) > 0 || cm.schema()->eval_ignore().count(c) > 0;
}

}  // namespace

double miou(const ConfusionMatrix& cm, const std::set<ClassId>& ignore) {
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t c = 0; c < cm.classes(); ++c) {
        const auto id = static_cast<ClassId>(c);
        if (excluded(cm, id, ignore)) continue;
        if (auto v = iou(cm, id)) {
            sum += *v;
            ++n;
        }
    }
    if (n == 0) throw std::domain_error("mIoU is undefined: every class is absent or ignored");
    return sum / static_cast<double>(n);
}

PrecisionRecall precision_recall(const ConfusionMatrix& cm, ClassId c) {
    PrecisionRecall pr;
    const auto tp = cm.true_positives(c);
    const auto predicted = tp + cm.false_positives(c);
    const auto actual = tp + cm.false_negatives(c);
    if (predicted == 0) {
        pr.precision_undefined = true;
    } else {
        pr.precision = static_cast<double>(tp) / static_cast<double>(predicted);
    }
    if (actual == 0) {
        pr.recall_undefined = true;
    } else {
        pr.recall = static_cast<double>(tp) / static_cast<double>(actual);
    }
    return pr;
}

double f_beta(double precision, double recall, double beta) {
    if (!(beta > 0.0)) throw std::invalid_argument("f_beta: beta must be positive");
    // Equal inputs reduce to that value; returning it avoids a rounding step.
    if (precision == recall) return precision;
    const double b2 = beta * beta;
    const double numerator = (1.0 + b2) * precision * recall;
    if (numerator == 0.0) return 0.0;
    return numerator / (b2 * precision + recall);
}

ClassReport make_report(const ConfusionMatrix& cm, std::vector<double> betas, const std::set<ClassId>& ignore,
                        std::string model) {
    for (double b : betas) {
        if (!(b > 0.0)) throw std::invalid_argument("beta values must be positive");
    }
    ClassReport report;
    report.model = std::move(model);
    report.schema = cm.schema()->name();
    report.betas = std::move(betas);
    report.total_points = cm.total();
    report.macro_f_beta.assign(report.betas.size(), 0.0);
    std::size_t evaluated = 0;
    double iou_sum = 0.0;
    std::size_t iou_count = 0;
    for (std::size_t c = 0; c < cm.classes(); ++c) {
        const auto id = static_cast<ClassId>(c);
        ClassMetrics m;
        m.id = id;
        m.name = cm.schema()->at(id).name;
        m.ignored = excluded(cm, id, ignore);
        m.iou = iou(cm, id);
        m.pr = precision_recall(cm, id);
        m.support = cm.support(id);
        for (double b : report.betas) m.f_beta.push_back(f_beta(m.pr.precision, m.pr.recall, b));
        if (!m.ignored && m.iou) {
            iou_sum += *m.iou;
            ++iou_count;
            ++evaluated;
            for (std::size_t k = 0; k < report.betas.size(); ++k) report.macro_f_beta[k] += m.f_beta[k];
        }
        report.classes.push_back(std::move(m));
    }
    if (iou_count > 0) report.miou = iou_sum / static_cast<double>(iou_count);
    for (auto& f : report.macro_f_beta) f = evaluated ? f / static_cast<double>(evaluated) : 0.0;
    return report;
}

namespace {

std::string beta_key(double beta) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "f%g", beta);
    return buf;
}

}  // namespace

nlohmann::json ClassReport::to_json() const {
    nlohmann::json per_class = nlohmann::json::array();
    for (const auto& m : classes) {
        nlohmann::json f = nlohmann::json::object();
        for (std::size_t k = 0; k < betas.size(); ++k) f[beta_key(betas[k])] = m.f_beta[k];
        per_class.push_back({{"id", m.id},
                             {"name", m.name},
                             {"ignored", m.ignored},
                             {"absent", !m.iou.has_value()},
                             {"iou", m.iou ? nlohmann::json(*m.iou) : nlohmann::json(nullptr)},
                             {"precision", m.pr.precision},
                             {"recall", m.pr.recall},
                             {"precision_undefined", m.pr.precision_undefined},
                             {"recall_undefined", m.pr.recall_undefined},
                             {"f_beta", f},
                             {"support", m.support}});
    }
    nlohmann::json macro = nlohmann::json::object();
    for (std::size_t k = 0; k < betas.size(); ++k) macro[beta_key(betas[k])] = macro_f_beta[k];
    return {{"model", model},
            {"schema", schema},
            {"betas", betas},
            {"miou", miou ? nlohmann::json(*miou) : nlohmann::json(nullptr)},
            {"macro_f_beta", macro},
            {"total_points", total_points},
            {"classes", per_class}};
}

std::string ClassReport::to_table() const {
    auto cell = [](const std::optional<double>& v) {
        if (!v) return std::string("---");
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.4f", *v);
        return std::string(buf);
    };
    std::vector<std::string> header{"Model", "Mean IoU"};
    for (const auto& m : classes) header.push_back(m.name);
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> iou_row{model, cell(miou)};
    for (const auto& m : classes) iou_row.push_back(m.ignored ? "---" : cell(m.iou));
    rows.push_back(iou_row);
    for (std::size_t k = 0; k < betas.size(); ++k) {
        char label[48];
        std::snprintf(label, sizeof(label), "%s F%g", model.c_str(), betas[k]);
        std::vector<std::string> row{label, cell(macro_f_beta[k])};
        for (const auto& m : classes) {
            row.push_back(m.ignored || !m.iou ? "---" : cell(m.f_beta[k]));
        }
        rows.push_back(row);
    }
    std::vector<std::size_t> width(header.size());
    for (std::size_t c = 0; c < header.size(); ++c) {
        width[c] = header[c].size();
        for (const auto& r : rows) width[c] = std::max(width[c], r[c].size());
    }
    auto line = [&](const std::vector<std::string>& r) {
        std::string out;
        for (std::size_t c = 0; c < r.size(); ++c) {
            if (c == 1 || c == 2) out += c == 1 ? " | " : " | ";
            else if (c > 2) out += "  ";
            out += r[c];
            out.append(width[c] - r[c].size(), ' ');
        }
        while (!out.empty() && out.back() == ' ') out.pop_back();
        return out + "\n";
    };
    std::string table = line(header);
    std::size_t rule = 0;
    for (std::size_t c = 0; c < width.size(); ++c) rule += width[c] + (c == 0 ? 0 : c <= 2 ? 3 : 2);
    table += std::string(rule, '-') + "\n";
    for (const auto& r : rows) table += line(r);
    return table;
}

ClassHistogram class_histogram(std::span<const ClassId> labels, const ClassSchema& schema) {
    ClassHistogram h;
    h.counts.assign(schema.size(), 0);
    h.fractions.assign(schema.size(), 0.0);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] >= schema.size()) throw DataError("label out of range at point " + std::to_string(i));
        ++h.counts[labels[i]];
    }
    h.total = labels.size();
    if (h.total > 0) {
        for (std::size_t c = 0; c < h.counts.size(); ++c) {
            h.fractions[c] = static_cast<double>(h.counts[c]) / static_cast<double>(h.total);
        }
    }
    return h;
}

ClassWeights inverse_frequency_weights(const ClassHistogram& histogram) {
    std::uint64_t total = 0;
    std::size_t present = 0;
    for (auto n : histogram.counts) {
        total += n;
        if (n > 0) ++present;
    }
    if (present == 0) throw std::invalid_argument("inverse_frequency_weights: histogram has no counts");
    ClassWeights w;
    w.weights.assign(histogram.counts.size(), 0.0);
    w.absent.assign(histogram.counts.size(), 0);
    for (std::size_t c = 0; c < histogram.counts.size(); ++c) {
        if (histogram.counts[c] == 0) {
            w.absent[c] = 1;
            continue;
        }
        w.weights[c] = static_cast<double>(total) /
                       (static_cast<double>(present) * static_cast<double>(histogram.counts[c]));
    }
    return w;
}

}  // namespace gridscan
