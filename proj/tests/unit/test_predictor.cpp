// SPDX-FileCopyrightText: 2026 The gridscan authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cstring>
#include <random>

#include "gridscan/error.hpp"
#include "gridscan/geometry/ground_filter.hpp"
#include "gridscan/predictor/heuristic.hpp"
#include "gridscan/predictor/softmax_prediction.hpp"
#include "test_util.hpp"

using namespace gridscan;

namespace {

std::shared_ptr<const ClassSchema> two_class() {
    return std::make_shared<const ClassSchema>(ClassSchema("two", {{0, "a"}, {1, "b"}}));
}

std::string prediction_bytes(std::size_t n, const std::vector<std::string>& names, const std::vector<float>& values) {
    nlohmann::json h{{"n", n}, {"c", names.size()}, {"classes", names}};
    std::string out = h.dump() + "\n";
    const auto at = out.size();
    out.resize(at + values.size() * sizeof(float));
    std::memcpy(out.data() + at, values.data(), values.size() * sizeof(float));
    return out;
}

PointCloud cloud_of(std::vector<Vec3> pts) {
    CloudAttributes a;
    a.positions = std::move(pts);
    return PointCloud(std::move(a));
}

std::vector<Vec3> ground_plane(double x0, double x1, double y0, double y1, double step) {
    std::vector<Vec3> pts;
    for (double x = x0; x < x1; x += step)
        for (double y = y0; y < y1; y += step) pts.emplace_back(x, y, 0.0);
    return pts;
}

}  // namespace

TEST_CASE("prediction file examples") {
    const auto schema = two_class();
    const auto one_hot = decode_predictions(prediction_bytes(1, {"a", "b"}, {1.0f, 0.0f}), 1, schema);
    CHECK(one_hot.size() == 1);
    CHECK(argmax_labels(one_hot) == std::vector<ClassId>{0});

    const auto renorm = decode_predictions(prediction_bytes(1, {"a", "b"}, {0.5004f, 0.5004f}), 1, schema);
    CHECK(renorm.row(0)[0] == 0.5f);
    CHECK(renorm.row(0)[1] == 0.5f);

    CHECK_THROWS_AS(decode_predictions(prediction_bytes(10, {"a", "b"}, std::vector<float>(20, 0.5f)), 9, schema),
                    DataError);
    CHECK_THROWS_AS(decode_predictions(prediction_bytes(1, {"a", "c"}, {1.0f, 0.0f}), 1, schema), DataError);
    CHECK_THROWS_AS(decode_predictions(prediction_bytes(1, {"a", "b"}, {0.6f, 0.6f}), 1, schema), DataError);
    CHECK_THROWS_AS(decode_predictions(prediction_bytes(2, {"a", "b"}, {1.0f, 0.0f, 1.0f}), 2, schema), DataError);
    CHECK_THROWS_AS(decode_predictions("no header", 1, schema), DataError);
}

TEST_CASE("prediction files round-trip bit-exactly") {
    std::mt19937_64 rng(31);
    const auto schema = ClassSchema::ts40k();
    std::vector<double> scores(500 * 6);
    std::normal_distribution<double> g(0, 3);
    for (auto& s : scores) s = g(rng);
    const auto pred = softmax_rows(scores, 0.7, schema);
    const auto back = decode_predictions(encode_predictions(pred), 500, schema);
    CHECK(back == pred);
    CHECK(std::memcmp(back.data().data(), pred.data().data(), pred.data().size_bytes()) == 0);

    testutil::TempDir dir("pred");
    write_predictions(dir / "p.bin", pred);
    CloudAttributes a;
    a.positions.assign(500, Vec3::Zero());
    CHECK(load_predictions(dir / "p.bin", PointCloud(a), schema) == pred);
}

TEST_CASE("softmax rows close to one") {
    std::mt19937_64 rng(32);
    std::uniform_real_distribution<double> u(-50, 50);
    std::vector<double> scores(1000 * 4);
    for (auto& s : scores) s = u(rng);
    const auto schema = ClassSchema::tsrgb();
    for (double t : {0.05, 1.0, 20.0}) {
        const auto p = softmax_rows(scores, t, schema);
        for (std::size_t i = 0; i < p.size(); ++i) {
            double sum = 0;
            for (float v : p.row(i)) {
                CHECK(v >= 0.0f);
                CHECK(v <= 1.0f);
                sum += v;
            }
            CHECK(std::abs(sum - 1.0) <= 1e-6);
        }
    }
    CHECK_THROWS_AS(softmax_rows(scores, 0.0, schema), std::invalid_argument);
}

TEST_CASE("argmax examples and tie rule") {
    const std::vector<float> a{0.1f, 0.9f}, b{0.5f, 0.5f};
    CHECK(argmax(a) == 1);
    CHECK(argmax(b) == 0);

    std::mt19937_64 rng(33);
    std::vector<float> probs;
    for (int i = 0; i < 1000; ++i) {
        std::vector<float> row(4);
        for (auto& v : row) v = static_cast<float>(rng() % 5);
        float s = row[0] + row[1] + row[2] + row[3];
        if (s == 0.0f) row = {1, 1, 1, 1}, s = 4;
        for (auto& v : row) probs.push_back(v / s);
    }
    const SoftmaxPrediction pred(probs, ClassSchema::tsrgb());
    const auto labels = argmax_labels(pred);
    for (std::size_t i = 0; i < 1000; ++i) {
        std::size_t best = 0;
        for (std::size_t c = 1; c < 4; ++c)
            if (probs[i * 4 + c] > probs[i * 4 + best]) best = c;
        CHECK(labels[i] == best);
    }
}

TEST_CASE("argmax is invariant under joint score and temperature scaling") {
    std::mt19937_64 rng(34);
    std::uniform_real_distribution<double> u(-5, 5);
    std::vector<double> scores(600 * 6);
    for (auto& s : scores) s = u(rng);
    const auto schema = ClassSchema::ts40k();
    const auto base = argmax_labels(softmax_rows(scores, 1.0, schema));
    for (double k : {0.25, 3.0, 10.0}) {
        auto scaled = scores;
        for (auto& s : scaled) s *= k;
        CHECK(argmax_labels(softmax_rows(scaled, k, schema)) == base);
    }
}

TEST_CASE("probability text export") {
    const auto p = parse_probability_text("0.25 0.75\n1 0\n", two_class());
    CHECK(p.size() == 2);
    CHECK(p.row(0)[1] == 0.75f);
    CHECK_THROWS_AS(parse_probability_text("0.5 0.5 0\n", two_class()), DataError);
}

TEST_CASE("heuristic labels a hanging conductor as power line") {
    auto pts = ground_plane(-20, 40, -10, 10, 0.5);
    const std::size_t line_begin = pts.size();
    for (double x = 0.0; x < 30.0; x += 0.1) pts.emplace_back(x, 0.0, 8.0);
    const auto cloud = cloud_of(pts);
    const auto mask = filter_ground(cloud);
    const auto labels = argmax_labels(predict_heuristic(cloud, mask, ClassSchema::ts40k()));
    std::size_t hits = 0;
    for (std::size_t i = line_begin; i < pts.size(); ++i) hits += labels[i] == 5;
    CHECK(static_cast<double>(hits) / static_cast<double>(pts.size() - line_begin) >= 0.95);

    std::size_t ground = 0;
    for (std::size_t i = 0; i < line_begin; ++i) ground += labels[i] == 1;
    CHECK(ground == line_begin);
}

TEST_CASE("heuristic labels flat ground and isolated high points") {
    auto pts = ground_plane(0, 20, 0, 20, 0.4);
    pts.emplace_back(10.0, 10.0, 50.0);
    const auto cloud = cloud_of(pts);
    const auto mask = filter_ground(cloud);
    const auto pred = predict_heuristic(cloud, mask, ClassSchema::ts40k());
    const auto labels = argmax_labels(pred);
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) CHECK(labels[i] == 1);
    CHECK(labels.back() == 0);
    for (std::size_t i = 0; i < pred.size(); ++i) {
        double s = 0;
        for (float v : pred.row(i)) s += v;
        CHECK(std::abs(s - 1.0) <= 1e-6);
    }

    const auto rgb = argmax_labels(predict_heuristic(cloud, mask, ClassSchema::tsrgb()));
    CHECK(rgb.back() == 0);
    CHECK(predict_heuristic(cloud, mask, ClassSchema::ts40k()) == pred);

    const auto odd = std::make_shared<const ClassSchema>(ClassSchema("odd", {{0, "x"}, {1, "y"}}));
    CHECK_THROWS_AS(predict_heuristic(cloud, mask, odd), std::invalid_argument);
}
