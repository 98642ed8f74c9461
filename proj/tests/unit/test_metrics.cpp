// SPDX-FileCopyrightText: 2026 The gridscan authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <random>

#include "gridscan/error.hpp"
#include "gridscan/metrics/metrics.hpp"
#include "oracles.hpp"

using namespace gridscan;

namespace {

std::shared_ptr<const ClassSchema> classes(std::size_t c) {
    std::vector<ClassInfo> info;
    for (std::size_t i = 0; i < c; ++i) info.push_back({static_cast<ClassId>(i), "c" + std::to_string(i)});
    return std::make_shared<const ClassSchema>(ClassSchema("plain" + std::to_string(c), info));
}

ConfusionMatrix matrix(std::size_t c, const std::vector<ClassId>& truth, const std::vector<ClassId>& pred,
                       const std::set<ClassId>& ignore = {}) {
    ConfusionMatrix cm(classes(c));
    cm.accumulate(truth, pred, ignore);
    return cm;
}

}  // namespace

TEST_CASE("accumulate examples") {
    std::vector<ClassId> same(100);
    for (std::size_t i = 0; i < 100; ++i) same[i] = static_cast<ClassId>(i % 4);
    const auto diag = matrix(4, same, same);
    CHECK(diag.total() == 100);
    std::uint64_t trace = 0;
    for (ClassId c = 0; c < 4; ++c) {
        trace += diag.at(c, c);
        for (ClassId d = 0; d < 4; ++d)
            if (c != d) CHECK(diag.at(c, d) == 0);
    }
    CHECK(trace == 100);

    const auto hand = matrix(2, {0, 0, 1}, {0, 1, 1});
    CHECK(hand.at(0, 0) == 1);
    CHECK(hand.at(0, 1) == 1);
    CHECK(hand.at(1, 1) == 1);
    CHECK(hand.at(1, 0) == 0);

    CHECK(matrix(2, {1, 1}, {0, 1}, {1}).total() == 0);

    ConfusionMatrix cm(classes(2));
    CHECK_THROWS_AS(cm.accumulate(std::vector<ClassId>{0}, std::vector<ClassId>{0, 1}), std::invalid_argument);
    CHECK_THROWS_AS(cm.accumulate(std::vector<ClassId>{2}, std::vector<ClassId>{0}), DataError);
}

TEST_CASE("IoU and mIoU examples") {
    const std::vector<ClassId> labels{0, 1, 2, 3, 1, 2};
    const auto perfect = matrix(4, labels, labels);
    for (ClassId c = 0; c < 4; ++c) CHECK(*iou(perfect, c) == 1.0);
    CHECK(miou(perfect) == 1.0);

    const auto hand = matrix(2, {0, 0, 1, 1}, {0, 1, 1, 1});
    CHECK(*iou(hand, 0) == 0.5);
    CHECK(*iou(hand, 1) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(miou(hand) == doctest::Approx(7.0 / 12.0).epsilon(1e-15));

    const auto absent = matrix(4, {0, 1, 2, 0}, {0, 1, 1, 0});
    CHECK_FALSE(iou(absent, 3).has_value());
    CHECK(miou(absent) == doctest::Approx((1.0 + 0.5 + 0.0) / 3.0));
    CHECK(miou(absent, {2}) == doctest::Approx(0.75));

    CHECK_THROWS_AS(miou(ConfusionMatrix(classes(3))), std::domain_error);
}

TEST_CASE("precision and recall examples") {
    const std::vector<ClassId> labels{0, 1, 1, 2};
    const auto diag = matrix(4, labels, labels);
    for (ClassId c = 0; c < 3; ++c) {
        const auto pr = precision_recall(diag, c);
        CHECK(pr.precision == 1.0);
        CHECK(pr.recall == 1.0);
    }
    const auto missing = precision_recall(diag, 3);
    CHECK(missing.precision == 0.0);
    CHECK(missing.recall == 0.0);
    CHECK(missing.precision_undefined);
    CHECK(missing.recall_undefined);

    // TP = 8, FP = 2, FN = 1 for class 1.
    std::vector<ClassId> truth, pred;
    for (int i = 0; i < 8; ++i) truth.push_back(1), pred.push_back(1);
    for (int i = 0; i < 2; ++i) truth.push_back(0), pred.push_back(1);
    truth.push_back(1), pred.push_back(0);
    const auto pr = precision_recall(matrix(2, truth, pred), 1);
    CHECK(pr.precision == 0.8);
    CHECK(pr.recall == 8.0 / 9.0);
    CHECK_FALSE(pr.precision_undefined);
}

TEST_CASE("f_beta examples and ordering") {
    for (double p : {0.0, 0.1, 0.37, 0.5, 0.93, 1.0})
        for (double b : {0.5, 1.0, 2.0, 3.3}) CHECK(f_beta(p, p, b) == p);
    CHECK(f_beta(0.8, 0.9, 2.0) == doctest::Approx(3.6 / 4.1).epsilon(1e-15));
    CHECK(f_beta(0.8, 0.9, 2.0) == doctest::Approx(0.878049).epsilon(1e-6));
    CHECK(f_beta(1.0, 0.0, 2.0) == 0.0);
    CHECK_THROWS_AS(f_beta(0.5, 0.5, 0.0), std::invalid_argument);

    for (int i = 1; i <= 50; ++i) {
        for (int j = 1; j <= 50; ++j) {
            const double p = i / 50.0, r = j / 50.0;
            if (r > p) CHECK(f_beta(p, r, 2) > f_beta(p, r, 1));
            if (j < 50) CHECK(f_beta(p, (j + 1) / 50.0, 2) >= f_beta(p, r, 2));
            if (i < 50) CHECK(f_beta((i + 1) / 50.0, r, 0.5) >= f_beta(p, r, 0.5));
        }
    }
}

TEST_CASE("metrics match per-point counting") {
    std::mt19937_64 rng(51);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t c = trial % 2 ? 4 : 6;
        const std::size_t n = 1 + rng() % 3000;
        std::vector<ClassId> truth(n), pred(n);
        for (std::size_t i = 0; i < n; ++i) {
            truth[i] = static_cast<ClassId>(rng() % c);
            pred[i] = rng() % 3 ? truth[i] : static_cast<ClassId>(rng() % c);
        }
        const auto cm = matrix(c, truth, pred);
        double sum = 0;
        std::size_t present = 0;
        for (ClassId k = 0; k < c; ++k) {
            const auto t = oracle::tally(truth, pred, k);
            if (t.tp + t.fp + t.fn > 0) {
                sum += oracle::ratio(t.tp, t.tp + t.fp + t.fn);
                ++present;
                CHECK(std::abs(*iou(cm, k) - oracle::ratio(t.tp, t.tp + t.fp + t.fn)) <= 1e-12);
            }
            const auto pr = precision_recall(cm, k);
            const double p = oracle::ratio(t.tp, t.tp + t.fp), r = oracle::ratio(t.tp, t.tp + t.fn);
            CHECK(std::abs(pr.precision - p) <= 1e-12);
            CHECK(std::abs(pr.recall - r) <= 1e-12);
            for (double b : {0.5, 1.0, 2.0}) CHECK(std::abs(f_beta(pr.precision, pr.recall, b) - oracle::f_beta(p, r, b)) <= 1e-12);
        }
        CHECK(std::abs(miou(cm) - sum / static_cast<double>(present)) <= 1e-12);
    }
}

TEST_CASE("streaming accumulation equals one-shot") {
    std::mt19937_64 rng(52);
    const std::size_t n = 5000;
    std::vector<ClassId> truth(n), pred(n);
    for (std::size_t i = 0; i < n; ++i) truth[i] = rng() % 6, pred[i] = rng() % 6;
    const auto whole = matrix(6, truth, pred, {0});
    ConfusionMatrix streamed(classes(6));
    std::size_t at = 0;
    while (at < n) {
        const std::size_t len = std::min<std::size_t>(n - at, 1 + rng() % 700);
        ConfusionMatrix part(classes(6));
        part.accumulate(std::span(truth).subspan(at, len), std::span(pred).subspan(at, len), {0});
        streamed.merge(part);
        at += len;
    }
    CHECK(streamed == whole);
    const auto a = matrix(6, truth, truth), b = matrix(6, pred, truth);
    CHECK(merge(a, b) == merge(b, a));
}

TEST_CASE("class report JSON and table") {
    const auto schema = ClassSchema::ts40k();
    ConfusionMatrix cm(schema);
    cm.accumulate(std::vector<ClassId>{0, 1, 1, 4, 5, 5}, std::vector<ClassId>{0, 1, 2, 4, 5, 1});
    const auto report = make_report(cm, {0.5, 1.0, 2.0}, {0}, "heuristic");
    CHECK(report.classes.size() == 6);
    CHECK(report.classes[0].ignored);
    CHECK(report.classes[5].f_beta.size() == 3);
    const auto& pl = report.classes[5];
    CHECK(pl.pr.precision == 1.0);
    CHECK(pl.pr.recall == 0.5);
    CHECK(pl.f_beta[0] > pl.f_beta[1]);
    CHECK(pl.f_beta[1] > pl.f_beta[2]);
    CHECK(report.miou.has_value());
    const auto j = report.to_json();
    CHECK(j["model"] == "heuristic");
    CHECK(j.dump().find("f0.5") != std::string::npos);
    const auto table = report.to_table();
    CHECK(table.find("heuristic") != std::string::npos);
    CHECK(table.find("power_line") != std::string::npos);
    CHECK(table.find("Mean IoU") != std::string::npos);
}

TEST_CASE("class histogram examples") {
    const auto schema = classes(2);
    const auto h = class_histogram(std::vector<ClassId>{0, 0, 1}, *schema);
    CHECK(h.counts == std::vector<std::uint64_t>{2, 1});
    CHECK(h.fractions[0] == 2.0 / 3.0);
    CHECK(h.fractions[1] == 1.0 / 3.0);

    std::vector<ClassId> ts(10000, 2);
    std::fill(ts.begin(), ts.begin() + 5528, ClassId{1});
    CHECK(class_histogram(ts, *ClassSchema::ts40k()).fractions[1] == doctest::Approx(0.5528).epsilon(1e-12));

    CHECK(class_histogram(std::vector<ClassId>{}, *schema).empty());
    CHECK_THROWS_AS(class_histogram(std::vector<ClassId>{7}, *schema), DataError);
}

TEST_CASE("inverse frequency weights examples") {
    ClassHistogram h;
    h.counts = {50, 50};
    h.total = 100;
    CHECK(inverse_frequency_weights(h).weights == std::vector<double>{1.0, 1.0});

    h.counts = {90, 10};
    const auto w = inverse_frequency_weights(h);
    CHECK(w.weights[0] == doctest::Approx(5.0 / 9.0).epsilon(1e-15));
    CHECK(w.weights[1] == doctest::Approx(5.0).epsilon(1e-15));
    CHECK(w.weights[0] * 90 + w.weights[1] * 10 == doctest::Approx(100.0));

    h.counts = {100, 0};
    const auto a = inverse_frequency_weights(h);
    CHECK(a.weights == std::vector<double>{1.0, 0.0});
    CHECK(a.absent == std::vector<std::uint8_t>{0, 1});

    h.counts = {0, 0};
    h.total = 0;
    CHECK_THROWS_AS(inverse_frequency_weights(h), std::invalid_argument);
}
