#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "thzloc/random.hpp"
#include "thzloc/topology.hpp"

using namespace thzloc;

namespace {

// Asymptotic Kolmogorov survival function Q(lambda).
double kolmogorov_q(double lambda) {
    if (lambda < 1e-3) return 1.0;
    double sum = 0.0;
    for (int j = 1; j <= 100; ++j) sum += 2.0 * ((j % 2) ? 1.0 : -1.0) * std::exp(-2.0 * j * j * lambda * lambda);
    return std::clamp(sum, 0.0, 1.0);
}

// One-sample KS p-value against Uniform[0, hi].
double ks_uniform_pvalue(std::vector<double> xs, double hi) {
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double f = xs[i] / hi;
        d = std::max({d, (i + 1) / n - f, f - i / n});
    }
    const double sn = std::sqrt(n);
    return kolmogorov_q((sn + 0.12 + 0.11 / sn) * d);
}

}  // namespace

TEST(BuildGrid, ReferenceDeployment) {
    const auto t = build_grid(25, 25, 0.009);
    EXPECT_EQ(t.node_positions.size(), 625u);
    EXPECT_NEAR(t.extent_d, 0.216, 1e-15);
    for (const auto& p : t.node_positions) EXPECT_EQ(p.z, 0.0);
    EXPECT_EQ(t.node_positions.front(), (Position3{0, 0, 0}));
    EXPECT_NEAR(t.node_positions.back().x, 0.216, 1e-15);
    EXPECT_NEAR(t.node_positions.back().y, 0.216, 1e-15);
}

TEST(BuildGrid, SingleNode) {
    const auto t = build_grid(1, 1, 0.009);
    ASSERT_EQ(t.node_positions.size(), 1u);
    EXPECT_EQ(t.node_positions[0], (Position3{0, 0, 0}));
    EXPECT_EQ(t.extent_d, 0.0);
}

TEST(BuildGrid, UnitSquare) {
    const auto t = build_grid(2, 2, 1.0);
    const std::vector<Position3> want{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0}};
    EXPECT_EQ(t.node_positions, want);
}

TEST(BuildGrid, RejectsBadInput) {
    EXPECT_THROW(build_grid(5, 5, 0.0), std::invalid_argument);
    EXPECT_THROW(build_grid(5, 5, -1.0), std::invalid_argument);
    EXPECT_THROW(build_grid(0, 5, 1.0), std::invalid_argument);
}

TEST(PlaceAnchors, CornersOfReferenceGrid) {
    const auto t = place_anchors(build_grid(25, 25, 0.009), 4);
    ASSERT_EQ(t.anchor_positions.size(), 4u);
    const std::vector<Position3> want{{0, 0, 0}, {0.216, 0, 0}, {0, 0.216, 0}, {0.216, 0.216, 0}};
    for (std::size_t i = 0; i < 4; ++i) EXPECT_LT(distance(t.anchor_positions[i], want[i]), 1e-15);
}

TEST(PlaceAnchors, CornersCoincideWithTwoByTwoNodes) {
    const auto t = place_anchors(build_grid(2, 2, 1.0), 4);
    for (const auto& a : t.anchor_positions)
        EXPECT_NE(std::find(t.node_positions.begin(), t.node_positions.end(), a), t.node_positions.end());
}

TEST(PlaceAnchors, EightAnchorsAddEdgeMidpoints) {
    const auto t = place_anchors(build_grid(25, 25, 0.009), 8);
    ASSERT_EQ(t.anchor_positions.size(), 8u);
    const auto& c = t.anchor_positions;
    // every added anchor is the average of two corners sharing an edge
    const std::vector<std::pair<int, int>> edges{{0, 1}, {2, 3}, {0, 2}, {1, 3}};
    for (std::size_t i = 4; i < 8; ++i) {
        bool on_edge = false;
        for (auto [a, b] : edges) on_edge |= distance(c[i], (c[a] + c[b]) * 0.5) < 1e-15;
        EXPECT_TRUE(on_edge) << c[i];
    }
    for (std::size_t i = 4; i < 8; ++i)
        for (std::size_t j = i + 1; j < 8; ++j) EXPECT_GT(distance(c[i], c[j]), 0.1);
}

TEST(PlaceAnchors, CountsFiveToNine) {
    const auto grid = build_grid(25, 25, 0.009);
    const Position3 center{0.108, 0.108, 0};
    for (std::size_t n = 4; n <= 9; ++n) {
        const auto t = place_anchors(grid, n);
        EXPECT_EQ(t.anchor_positions.size(), n);
        for (const auto& a : t.anchor_positions) EXPECT_EQ(a.z, 0.0);
        const bool has_center = std::any_of(t.anchor_positions.begin(), t.anchor_positions.end(),
                                            [&](const auto& a) { return distance(a, center) < 1e-15; });
        EXPECT_EQ(has_center, n == 5 || n == 7 || n == 9) << n;
    }
    EXPECT_THROW(place_anchors(grid, 3), std::invalid_argument);
    EXPECT_THROW(place_anchors(grid, 10), std::invalid_argument);
}

TEST(Mobility, NoneIsIdentity) {
    const auto t = place_anchors(build_grid(5, 5, 0.009), 4);
    RandomStream rng(1);
    EXPECT_EQ(apply_mobility(t, MobilityPattern::none, rng), t.node_positions);
}

TEST(Mobility, RandomBoxStaysInBoxAndIsUniform) {
    const auto t = build_grid(25, 25, 0.009);
    const double d = t.extent_d;
    std::vector<double> xs, ys, zs;
    for (std::uint64_t iter = 0; iter < 160; ++iter) {
        auto rng = RandomStream::for_iteration(7, iter, StreamPurpose::mobility);
        for (const auto& p : apply_mobility(t, MobilityPattern::random_box, rng)) {
            ASSERT_GE(p.x, 0.0);
            ASSERT_LE(p.x, d);
            ASSERT_GE(p.y, 0.0);
            ASSERT_LE(p.y, d);
            ASSERT_GE(p.z, 0.0);
            ASSERT_LE(p.z, d / 2);
            xs.push_back(p.x);
            ys.push_back(p.y);
            zs.push_back(p.z);
        }
    }
    ASSERT_GE(xs.size(), 100000u);
    EXPECT_GT(ks_uniform_pvalue(xs, d), 0.01);
    EXPECT_GT(ks_uniform_pvalue(ys, d), 0.01);
    EXPECT_GT(ks_uniform_pvalue(zs, d / 2), 0.01);
}

TEST(Mobility, HalfSphereApexAtGridCenter) {
    const auto t = build_grid(25, 25, 0.009);
    RandomStream rng(3);
    const auto moved = apply_mobility(t, MobilityPattern::half_sphere, rng);
    const auto& center = moved[12 * 25 + 12];
    EXPECT_NEAR(center.z, t.extent_d / 2, 1e-15);
    EXPECT_EQ(moved[0].z, 0.0);  // corner: u = v = -1
}

TEST(Mobility, HalfCylinderProfile) {
    const auto t = build_grid(25, 25, 0.009);
    RandomStream rng(3);
    const auto moved = apply_mobility(t, MobilityPattern::half_cylinder, rng);
    const double d = t.extent_d;
    for (std::size_t i = 0; i < moved.size(); ++i) {
        const double u = 2 * t.node_positions[i].x / d - 1;
        EXPECT_NEAR(moved[i].z, d / 2 * std::sqrt(std::max(0.0, 1 - u * u)), 1e-15);
        EXPECT_EQ(moved[i].y, t.node_positions[i].y);
    }
}

TEST(Mobility, AllPatternsInsideBoxAnchorsUntouched) {
    const auto t = place_anchors(build_grid(25, 25, 0.009), 8);
    const auto anchors = t.anchor_positions;
    for (auto pattern : {MobilityPattern::none, MobilityPattern::random_box, MobilityPattern::half_sphere,
                         MobilityPattern::half_cylinder}) {
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            RandomStream rng(seed);
            for (const auto& p : apply_mobility(t, pattern, rng)) {
                EXPECT_TRUE(p.x >= 0 && p.x <= t.extent_d && p.y >= 0 && p.y <= t.extent_d && p.z >= 0 &&
                            p.z <= t.extent_d / 2);
            }
        }
    }
    EXPECT_EQ(t.anchor_positions, anchors);
}

TEST(Mobility, DeterministicPerIteration) {
    const auto t = build_grid(10, 10, 0.009);
    auto a = RandomStream::for_iteration(1, 4, StreamPurpose::mobility);
    auto b = RandomStream::for_iteration(1, 4, StreamPurpose::mobility);
    EXPECT_EQ(apply_mobility(t, MobilityPattern::random_box, a), apply_mobility(t, MobilityPattern::random_box, b));
}

TEST(Mobility, RequiresExtent) {
    const auto t = build_grid(1, 1, 0.009);
    RandomStream rng(1);
    EXPECT_THROW(apply_mobility(t, MobilityPattern::random_box, rng), std::invalid_argument);
    EXPECT_NO_THROW(apply_mobility(t, MobilityPattern::none, rng));
}
