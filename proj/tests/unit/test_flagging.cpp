// SPDX-FileCopyrightText: 2026 The gridscan authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "gridscan/flagging/flagging.hpp"
#include "oracles.hpp"

using namespace gridscan;

namespace {

std::vector<std::vector<std::size_t>> memberships(const ClusterResult& r) {
    std::vector<std::vector<std::size_t>> out;
    for (const auto& c : r.clusters) out.push_back(c.members);
    return out;
}

/// Prediction whose first `undecided` rows have margin 0.1 and the rest are one-hot.
SoftmaxPrediction split_prediction(std::size_t n, std::size_t undecided) {
    std::vector<float> probs;
    probs.reserve(n * 4);
    for (std::size_t i = 0; i < n; ++i) {
        if (i < undecided) {
            probs.insert(probs.end(), {0.45f, 0.35f, 0.1f, 0.1f});
        } else {
            probs.insert(probs.end(), {0.0f, 1.0f, 0.0f, 0.0f});
        }
    }
    return SoftmaxPrediction(std::move(probs), ClassSchema::tsrgb());
}

}  // namespace

TEST_CASE("margin examples") {
    const std::vector<float> one_hot{1, 0, 0}, uniform{1.0f / 3, 1.0f / 3, 1.0f / 3}, mixed{0.5f, 0.3f, 0.2f},
        single{1.0f};
    CHECK(margin(one_hot) == 1.0);
    CHECK(margin(uniform) == 0.0);
    CHECK(margin(mixed) == doctest::Approx(0.2).epsilon(1e-7));
    CHECK(margin(single) == 1.0);
    CHECK(normalized_entropy(uniform) == doctest::Approx(1.0));
    CHECK(normalized_entropy(one_hot) == 0.0);
}

TEST_CASE("mark_undecided examples") {
    const auto schema = ClassSchema::tsrgb();
    FlagPolicy policy;
    const SoftmaxPrediction hot({1, 0, 0, 0, 0, 0, 1, 0}, schema);
    const auto none = mark_undecided(hot, policy);
    CHECK(std::count(none.begin(), none.end(), 1) == 0);

    const SoftmaxPrediction close({0.55f, 0.45f, 0, 0}, schema);
    CHECK(mark_undecided(close, policy)[0] == 1);

    policy.margin_threshold = 1e-9;
    const SoftmaxPrediction unequal({0.5f, 0.49f, 0.01f, 0, 0.9f, 0.1f, 0, 0}, schema);
    const auto tight = mark_undecided(unequal, policy);
    CHECK(std::count(tight.begin(), tight.end(), 1) == 0);

    policy = {};
    policy.measure = UncertaintyMeasure::entropy;
    const SoftmaxPrediction flat({0.25f, 0.25f, 0.25f, 0.25f}, schema);
    CHECK(mark_undecided(flat, policy)[0] == 1);
    CHECK(mark_undecided(hot, policy)[0] == 0);
}

TEST_CASE("raising the margin threshold never shrinks the undecided set") {
    std::mt19937_64 rng(41);
    std::vector<float> probs;
    for (int i = 0; i < 2000; ++i) {
        float row[4], s = 0;
        for (auto& v : row) s += (v = static_cast<float>(rng() % 1000 + 1));
        for (auto v : row) probs.push_back(v / s);
    }
    const SoftmaxPrediction pred(probs, ClassSchema::tsrgb());
    long prev = -1;
    for (double t = 0.01; t < 1.0; t += 0.05) {
        FlagPolicy p;
        p.margin_threshold = t;
        const auto m = mark_undecided(pred, p);
        const long count = std::count(m.begin(), m.end(), 1);
        CHECK(count >= prev);
        prev = count;
    }
}

TEST_CASE("cluster_undecided examples") {
    FlagPolicy policy;
    std::vector<Vec3> pts;
    for (int i = 0; i < 10; ++i) pts.emplace_back(0.01 * i, 0.0, 0.0);
    const std::vector<std::uint8_t> all(10, 1);
    const auto one = cluster_undecided(pts, all, policy);
    REQUIRE(one.clusters.size() == 1);
    CHECK(one.clusters[0].member_count == 10);
    CHECK(one.unclustered.empty());

    std::vector<Vec3> two;
    for (int i = 0; i < 10; ++i) two.emplace_back(100.0 + 0.01 * i, 0, 0);
    for (int i = 0; i < 10; ++i) two.emplace_back(0.01 * i, 0, 0);
    const auto r2 = cluster_undecided(two, std::vector<std::uint8_t>(20, 1), policy);
    REQUIRE(r2.clusters.size() == 2);
    CHECK(r2.clusters[0].members.front() == 0);
    CHECK(r2.clusters[1].members.front() == 10);
    CHECK(r2.clusters[0].cluster_id == 0);
    CHECK(r2.clusters[1].cluster_id == 1);
    CHECK(r2.clusters[0].centroid.x() == doctest::Approx(100.045));

    const std::vector<Vec3> sparse{{0, 0, 0}, {10, 0, 0}, {20, 0, 0}};
    const auto r3 = cluster_undecided(sparse, std::vector<std::uint8_t>(3, 1), policy);
    CHECK(r3.clusters.empty());
    CHECK(r3.unclustered.size() == 3);

    CHECK(cluster_undecided(sparse, std::vector<std::uint8_t>(3, 0), policy).clusters.empty());
}

TEST_CASE("cluster_undecided matches exhaustive DBSCAN") {
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t n = 1 + rng() % 1000;
        const auto pts = trial % 3 == 0 ? testgen::lattice_points(rng, n, 6) : testgen::random_points(rng, n, 6.0);
        std::vector<std::uint8_t> mask(n);
        for (auto& m : mask) m = rng() % 4 != 0;
        FlagPolicy policy;
        policy.cluster_radius = trial % 3 == 0 ? 1.0 : 0.5 + (rng() % 100) / 100.0;
        policy.cluster_min_points = 1 + rng() % 8;
        const auto got = cluster_undecided(pts, mask, policy);
        const auto want = oracle::dbscan(pts, mask, policy.cluster_radius, policy.cluster_min_points);
        CHECK(memberships(got) == want.clusters);
        CHECK(got.unclustered == want.noise);
    }
}

TEST_CASE("cluster memberships are permutation invariant") {
    std::mt19937_64 rng(43);
    const auto pts = testgen::random_points(rng, 800, 5.0);
    std::vector<std::uint8_t> mask(pts.size());
    for (auto& m : mask) m = rng() % 2;
    FlagPolicy policy;
    policy.cluster_radius = 0.8;
    const auto base = cluster_undecided(pts, mask, policy);

    std::vector<std::size_t> perm(pts.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<Vec3> p2;
    std::vector<std::uint8_t> m2;
    for (auto i : perm) {
        p2.push_back(pts[i]);
        m2.push_back(mask[i]);
    }
    const auto moved = cluster_undecided(p2, m2, policy);
    auto canon = [&](const ClusterResult& r, bool mapped) {
        std::vector<std::vector<std::size_t>> out;
        for (const auto& c : r.clusters) {
            std::vector<std::size_t> m;
            for (auto i : c.members) m.push_back(mapped ? perm[i] : i);
            std::sort(m.begin(), m.end());
            out.push_back(m);
        }
        std::sort(out.begin(), out.end());
        return out;
    };
    // Continuous coordinates make border ties vanishingly unlikely, so exact sets are expected.
    CHECK(base.unclustered.size() == moved.unclustered.size());
    CHECK(canon(base, false) == canon(moved, true));
}

TEST_CASE("flag_segment thresholds") {
    FlagPolicy policy;
    std::mt19937_64 rng(44);
    const auto pts = testgen::random_points(rng, 100000, 25.0);

    const auto quiet = flag_segment(3, pts, split_prediction(100000, 0), policy);
    CHECK(quiet.segment_id == 3);
    CHECK_FALSE(quiet.flagged);
    CHECK(quiet.clusters.empty());
    CHECK(quiet.undecided_count == 0);

    const auto loud = flag_segment(0, pts, split_prediction(100000, 600), policy);
    CHECK(loud.undecided_count == 600);
    CHECK(loud.undecided_fraction == doctest::Approx(0.006));
    CHECK(loud.flagged);

    const auto under = flag_segment(0, pts, split_prediction(100000, 99), policy);
    CHECK(under.undecided_fraction == doctest::Approx(0.00099));
    CHECK_FALSE(under.flagged);

    std::size_t members = 0;
    for (const auto& c : loud.clusters) members += c.member_count;
    CHECK(members + loud.unclustered_count == loud.undecided_count);
    CHECK(loud.per_class_undecided.size() == 4);
    CHECK(loud.per_class_undecided[0] == 600);

    CHECK_THROWS_AS(flag_segment(0, pts, split_prediction(10, 0), policy), std::invalid_argument);
}

TEST_CASE("flag decision is count or fraction and monotone in both thresholds") {
    FlagPolicy p;
    CHECK(flag_decision(100, 0.0, p));
    CHECK(flag_decision(1, 0.005, p));
    CHECK_FALSE(flag_decision(99, 0.00499, p));
    for (std::size_t count : {0u, 50u, 150u}) {
        for (double frac : {0.0, 0.001, 0.01}) {
            bool prev = true;
            for (std::size_t m = 1; m < 300; m += 20) {
                FlagPolicy q;
                q.segment_undecided_min = m;
                const bool f = flag_decision(count, frac, q);
                CHECK((prev || !f));
                prev = f;
            }
            prev = true;
            for (double t = 0.0005; t < 0.05; t *= 2) {
                FlagPolicy q;
                q.segment_undecided_fraction = t;
                const bool f = flag_decision(count, frac, q);
                CHECK((prev || !f));
                prev = f;
            }
        }
    }
}

TEST_CASE("flag report and policy JSON") {
    std::vector<Vec3> pts;
    for (int i = 0; i < 20; ++i) pts.emplace_back(0.1 * i, 0, 0);
    const auto r = flag_segment(7, pts, split_prediction(20, 12), FlagPolicy{});
    const auto j = r.to_json();
    for (const char* key : {"segment_id", "undecided_count", "undecided_fraction", "clusters", "flagged",
                            "per_class_undecided"})
        CHECK(j.contains(key));
    const auto back = FlagReport::from_json(j);
    CHECK(back.undecided_count == 12);
    CHECK(back.flagged == r.flagged);
    CHECK(back.clusters.size() == r.clusters.size());

    FlagPolicy p;
    p.margin_threshold = 0.3;
    p.cluster_min_points = 9;
    const auto q = flag_policy_from_json(to_json(p));
    CHECK(q.margin_threshold == 0.3);
    CHECK(q.cluster_min_points == 9);
    FlagPolicy bad;
    bad.margin_threshold = 1.5;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}
