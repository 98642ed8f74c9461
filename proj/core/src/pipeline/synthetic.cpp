// SPDX-FileCopyrightText: 2026 The gridscan authors
// SPDX-License-Identifier: Apache-2.0

#include "gridscan/pipeline/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

#include "gridscan/cloud/formats.hpp"

namespace gridscan {

SyntheticPreset preset_from_name(std::string_view name) {
    if (name == "corridor") return SyntheticPreset::corridor;
    if (name == "tower_radius") return SyntheticPreset::tower_radius;
    if (name == "power_line") return SyntheticPreset::power_line;
    if (name == "no_tower") return SyntheticPreset::no_tower;
    throw std::invalid_argument("unknown synthetic preset '" + std::string(name) + "'");
}

namespace {

constexpr ClassId kNoise = 0;
constexpr ClassId kGround = 1;
constexpr ClassId kLowVeg = 2;
constexpr ClassId kMedVeg = 3;
constexpr ClassId kTower = 4;
constexpr ClassId kLine = 5;

constexpr double kHalfWidth = 20.0;
constexpr double kPointsPerMeter = 1000.0;  ///< total points per meter of corridor
constexpr double kGroundShare = 0.55;
constexpr double kNoiseShare = 0.02;
constexpr double kMemberSpacing = 0.4;
constexpr double kWireSpacing = 0.2;
constexpr double kAmbiguousRadius = 3.0;

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    double normal(double sigma) {
        const double u1 = 1.0 - uniform();  // (0, 1]
        const double u2 = uniform();
        return sigma * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }
    std::size_t below(std::size_t n) { return static_cast<std::size_t>(uniform() * static_cast<double>(n)); }
    /// Uniform point in the unit ball.
    Vec3 ball() {
        for (;;) {
            Vec3 v(uniform(-1, 1), uniform(-1, 1), uniform(-1, 1));
            if (v.squaredNorm() <= 1.0) return v;
        }
    }

private:
    std::mt19937_64 engine_;
};

struct Terrain {
    double a1, p1, a2, p2, grade;

    double at(double x, double y) const {
        return a1 * std::sin(2.0 * std::numbers::pi * x / 80.0 + p1) +
               a2 * std::sin(2.0 * std::numbers::pi * y / 50.0 + p2) + grade * x;
    }
};

struct Tower {
    double x = 0.0;
    double base_z = 0.0;
    double height = 0.0;
};

struct Builder {
    Rng& rng;
    Terrain terrain;
    double length;
    std::vector<Vec3> points;
    std::vector<ClassId> labels;

    void add(const Vec3& p, ClassId c) {
        points.push_back(p);
        labels.push_back(c);
    }

    void member(const Vec3& a, const Vec3& b, ClassId c, double spacing, double jitter) {
        const double len = (b - a).norm();
        const auto steps = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(len / spacing)));
        for (std::size_t s = 0; s <= steps; ++s) {
            const Vec3 p = a + (b - a) * (static_cast<double>(s) / static_cast<double>(steps));
            add(p + Vec3(rng.normal(jitter), rng.normal(jitter), rng.normal(jitter)), c);
        }
    }

    void ground(std::size_t n) {
        for (std::size_t i = 0; i < n; ++i) {
            const double x = rng.uniform(0.0, length);
            const double y = rng.uniform(-kHalfWidth, kHalfWidth);
            add({x, y, terrain.at(x, y) + rng.normal(0.02)}, kGround);
        }
    }

    void noise(std::size_t n) {
        for (std::size_t i = 0; i < n; ++i) {
            const double x = rng.uniform(0.0, length);
            const double y = rng.uniform(-kHalfWidth, kHalfWidth);
            add({x, y, terrain.at(x, y) + rng.uniform(6.0, 45.0)}, kNoise);
        }
    }

    /// Ellipsoidal blob between heights lo and hi above the terrain.
    void blob(double cx, double cy, double rx, double ry, double lo, double hi, std::size_t n, ClassId c) {
        const double mid = 0.5 * (lo + hi);
        const double rz = 0.5 * (hi - lo);
        for (std::size_t i = 0; i < n; ++i) {
            const Vec3 u = rng.ball();
            const double x = cx + rx * u.x();
            const double y = cy + ry * u.y();
            add({x, y, terrain.at(x, y) + mid + rz * u.z()}, c);
        }
    }

    std::size_t shrub(double cx, double cy) {
        const std::size_t n = 150 + rng.below(250);
        blob(cx, cy, rng.uniform(0.8, 2.0), rng.uniform(0.8, 2.0), 0.6, rng.uniform(1.0, 1.6), n, kLowVeg);
        return n;
    }

    std::size_t tree(double cx, double cy, double radius) {
        const std::size_t crown = 250 + rng.below(350);
        const double hc = rng.uniform(3.5, 3.7);
        blob(cx, cy, radius, radius, hc - 1.0, std::min(hc + 1.0, 4.7), crown, kMedVeg);
        const double base = terrain.at(cx, cy);
        const std::size_t trunk = 30;
        for (std::size_t i = 0; i < trunk; ++i) {
            const double a = rng.uniform(0.0, 2.0 * std::numbers::pi);
            add({cx + 0.15 * std::cos(a), cy + 0.15 * std::sin(a), base + rng.uniform(0.0, hc - 1.0)}, kMedVeg);
        }
        return crown + trunk;
    }

    void tower(const Tower& t) {
        const double b0 = 3.0;
        const double bt = 1.0;
        const double j = 0.02;
        auto corner = [&](int k, double zr) {
            const double h = b0 + (bt - b0) * zr / t.height;
            const double sx = (k == 0 || k == 3) ? 1.0 : -1.0;
            const double sy = (k < 2) ? 1.0 : -1.0;
            return Vec3(t.x + sx * h, sy * h, t.base_z + zr);
        };
        for (int k = 0; k < 4; ++k) {
            Vec3 foot = corner(k, 0.0);
            foot.z() = terrain.at(foot.x(), foot.y());
            member(foot, corner(k, t.height), kTower, kMemberSpacing, j);
        }
        const int rings = static_cast<int>(t.height / 3.0);
        for (int r = 0; r <= rings; ++r) {
            const double z0 = 3.0 * r;
            const double z1 = std::min(3.0 * (r + 1), t.height);
            for (int k = 0; k < 4; ++k) {
                const int n = (k + 1) % 4;
                if (r > 0) member(corner(k, z0), corner(n, z0), kTower, kMemberSpacing, j);
                if (z1 > z0) {
                    member(corner(k, z0), corner(n, z1), kTower, kMemberSpacing, j);
                    member(corner(n, z0), corner(k, z1), kTower, kMemberSpacing, j);
                }
            }
        }
        for (double dx : {-0.4, 0.4}) {
            const double zl = t.base_z + t.height - 3.0;
            const double zu = t.base_z + t.height;
            member({t.x + dx, -6.5, zl}, {t.x + dx, 6.5, zl}, kTower, kMemberSpacing, j);
            member({t.x + dx, -3.5, zu}, {t.x + dx, 3.5, zu}, kTower, kMemberSpacing, j);
        }
    }

    /// Four conductors per span, hanging 0.6 m below the crossarms with a
    /// parabolic sag. Only the part inside the scene is sampled.
    void span(const Tower& a, const Tower& b) {
        const double span_len = b.x - a.x;
        const double sag = 0.035 * span_len;
        const struct {
            double y, drop;
        } wires[] = {{-6.0, 3.6}, {6.0, 3.6}, {-3.0, 0.6}, {3.0, 0.6}};
        for (const auto& w : wires) {
            const double za = a.base_z + a.height - w.drop;
            const double zb = b.base_z + b.height - w.drop;
            const double x0 = std::max(a.x + 0.3, 0.0);
            const double x1 = std::min(b.x - 0.3, length);
            for (double x = x0; x <= x1; x += kWireSpacing) {
                const double s = (x - a.x) / span_len;
                const double z = za + (zb - za) * s - 4.0 * sag * s * (1.0 - s);
                add({x + rng.normal(0.01), w.y + rng.normal(0.015), z + rng.normal(0.015)}, kLine);
            }
        }
    }
};

struct Layout {
    double length = 0.0;
    std::vector<double> towers;   ///< in-scene tower positions along x
    std::vector<double> virtuals; ///< out-of-scene tower positions carrying the spans
    bool lines = true;
    int border_sites = 2;
};

Layout layout_for(SyntheticPreset preset, Rng& rng) {
    Layout l;
    switch (preset) {
        case SyntheticPreset::corridor: {
            l.length = rng.uniform(150.0, 250.0);
            for (double x = rng.uniform(15.0, 30.0); x < l.length - 15.0 && l.towers.size() < 4;
                 x += rng.uniform(60.0, 90.0)) {
                l.towers.push_back(x);
            }
            l.virtuals = {l.towers.front() - rng.uniform(60.0, 90.0), l.towers.back() + rng.uniform(60.0, 90.0)};
            break;
        }
        case SyntheticPreset::tower_radius:
            l.length = 80.0;
            l.towers = {40.0};
            l.virtuals = {40.0 - rng.uniform(60.0, 90.0), 40.0 + rng.uniform(60.0, 90.0)};
            l.border_sites = 1;
            break;
        case SyntheticPreset::power_line:
            l.length = 120.0;
            l.virtuals = {-rng.uniform(10.0, 40.0), l.length + rng.uniform(10.0, 40.0)};
            l.border_sites = 1;
            break;
        case SyntheticPreset::no_tower:
            l.length = rng.uniform(100.0, 150.0);
            l.lines = false;
            break;
    }
    return l;
}

}  // namespace

SyntheticScene gen_synthetic(SyntheticPreset preset, std::uint64_t seed) {
    Rng rng(seed);
    const Layout layout = layout_for(preset, rng);
    const Terrain terrain{rng.uniform(0.3, 0.5), rng.uniform(0.0, 6.28), rng.uniform(0.2, 0.3), rng.uniform(0.0, 6.28),
                          rng.uniform(-0.015, 0.015)};
    Builder b{rng, terrain, layout.length, {}, {}};
    SyntheticScene scene;
    scene.length = layout.length;

    const auto budget = static_cast<std::size_t>(kPointsPerMeter * layout.length);
    const auto ground_n = static_cast<std::size_t>(kGroundShare * static_cast<double>(budget));
    const auto noise_n = static_cast<std::size_t>(kNoiseShare * static_cast<double>(budget));
    b.points.reserve(budget + budget / 10);
    b.labels.reserve(budget + budget / 10);

    b.ground(ground_n);

    std::vector<Tower> towers;
    for (double x : layout.towers) towers.push_back({x, terrain.at(x, 0.0), rng.uniform(25.0, 30.0)});
    for (const auto& t : towers) {
        b.tower(t);
        scene.tower_bases.emplace_back(t.x, 0.0, t.base_z);
    }
    if (layout.lines) {
        std::vector<Tower> carriers;
        const double h = towers.empty() ? rng.uniform(25.0, 30.0) : towers.front().height;
        carriers.push_back({layout.virtuals.front(), terrain.at(layout.virtuals.front(), 0.0), h});
        carriers.insert(carriers.end(), towers.begin(), towers.end());
        carriers.push_back({layout.virtuals.back(), terrain.at(layout.virtuals.back(), 0.0), carriers.back().height});
        for (std::size_t i = 0; i + 1 < carriers.size(); ++i) b.span(carriers[i], carriers[i + 1]);
    }

    std::size_t vegetation = 0;
    // Mixed-class injections: a tree grown into each tower base.
    for (const auto& t : towers) {
        const double sx = rng.uniform() < 0.5 ? -1.0 : 1.0;
        const double sy = rng.uniform() < 0.5 ? -1.0 : 1.0;
        const Eigen::Vector2d dir(sx * std::numbers::sqrt2 / 2.0, sy * std::numbers::sqrt2 / 2.0);
        const Eigen::Vector2d crown = Eigen::Vector2d(t.x, 0.0) + 4.6 * dir;
        vegetation += b.tree(crown.x(), crown.y(), 2.0);
        const Eigen::Vector2d site = Eigen::Vector2d(t.x, 0.0) + 3.6 * dir;
        scene.ambiguous_sites.emplace_back(site.x(), site.y(), terrain.at(site.x(), site.y()) + 3.0);
    }
    // Low shrub patches straddling the ground band.
    for (int s = 0; s < layout.border_sites; ++s) {
        for (int attempt = 0; attempt < 1000; ++attempt) {
            const double x = rng.uniform(8.0, layout.length - 8.0);
            const double y = rng.uniform(-14.0, 14.0);
            bool clear = true;
            for (const auto& t : towers) clear = clear && std::hypot(x - t.x, y) > 12.0;
            for (const auto& a : scene.ambiguous_sites) clear = clear && std::hypot(x - a.x(), y - a.y()) > 12.0;
            if (!clear) continue;
            b.blob(x, y, 2.2, 2.2, 0.05, 1.0, 500, kLowVeg);
            vegetation += 500;
            scene.ambiguous_sites.emplace_back(x, y, terrain.at(x, y) + 0.4);
            break;
        }
    }

    const std::size_t fixed = b.points.size() + noise_n;
    const std::size_t veg_budget = budget > fixed ? budget - fixed : 0;
    while (vegetation < veg_budget) {
        const double x = rng.uniform(2.0, layout.length - 2.0);
        const double y = rng.uniform(-kHalfWidth + 2.0, kHalfWidth - 2.0);
        bool clear = true;
        for (const auto& t : towers) clear = clear && std::hypot(x - t.x, y) > 7.0;
        for (const auto& a : scene.ambiguous_sites) clear = clear && std::hypot(x - a.x(), y - a.y()) > 6.0;
        if (!clear) continue;
        vegetation += rng.uniform() < 0.5 ? b.shrub(x, y) : b.tree(x, y, rng.uniform(1.2, 2.2));
    }

    b.noise(noise_n);

    scene.ambiguous.assign(b.points.size(), 0);
    const double r2 = kAmbiguousRadius * kAmbiguousRadius;
    for (std::size_t i = 0; i < b.points.size(); ++i) {
        for (const auto& site : scene.ambiguous_sites) {
            if ((b.points[i] - site).squaredNorm() <= r2) {
                scene.ambiguous[i] = 1;
                break;
            }
        }
    }

    CloudAttributes attrs;
    attrs.positions = std::move(b.points);
    attrs.labels = std::move(b.labels);
    scene.cloud = PointCloud(std::move(attrs), ClassSchema::ts40k());
    return scene;
}

void write_synthetic(const SyntheticScene& scene, const std::filesystem::path& path) {
    write_file(path, write_ply(scene.cloud, PlyEncoding::binary_little_endian));
}

}  // namespace gridscan
