#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "thzloc/vec3.hpp"

namespace thzloc {

/// Nanonode grid plus the controllers used as ranging anchors. Everything
/// sits on the z = 0 mounting plane until mobility displaces the nanonodes.
struct Topology {
    std::size_t rows = 0;
    std::size_t cols = 0;
    double spacing = 0.0;   // m
    double extent_d = 0.0;  // m, distance between two controllers on one edge
    std::vector<Position3> node_positions;
    std::vector<Position3> anchor_positions;
};

enum class AnchorScheme { corners };

inline std::string_view to_string(AnchorScheme) { return "corners"; }

enum class MobilityPattern { none, random_box, half_sphere, half_cylinder };

inline std::string_view to_string(MobilityPattern p) {
    switch (p) {
        case MobilityPattern::none: return "none";
        case MobilityPattern::random_box: return "random_box";
        case MobilityPattern::half_sphere: return "half_sphere";
        case MobilityPattern::half_cylinder: return "half_cylinder";
    }
    return "none";
}

inline Topology build_grid(std::size_t rows, std::size_t cols, double spacing) {
    if (rows < 1 || cols < 1) throw std::invalid_argument("build_grid: rows and cols must be >= 1");
    if (!(spacing > 0.0) || !std::isfinite(spacing))
        throw std::invalid_argument("build_grid: spacing must be positive");
    Topology t;
    t.rows = rows;
    t.cols = cols;
    t.spacing = spacing;
    t.extent_d = static_cast<double>(cols - 1) * spacing;
    t.node_positions.reserve(rows * cols);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c)
            t.node_positions.push_back({static_cast<double>(c) * spacing, static_cast<double>(r) * spacing, 0.0});
    return t;
}

/// Corners first; further anchors follow the fixed order
/// center (5), two opposite edge midpoints (6), +center (7), all four
/// edge midpoints (8), +center (9).
inline Topology place_anchors(Topology topology, std::size_t count, AnchorScheme scheme = AnchorScheme::corners) {
    if (count < 4) throw std::invalid_argument("place_anchors: 3D trilateration needs at least 4 anchors");
    if (count > 9) throw std::invalid_argument("place_anchors: at most 9 anchors are supported by the corner scheme");
    (void)scheme;
    const double xm = static_cast<double>(topology.cols - 1) * topology.spacing;
    const double ym = static_cast<double>(topology.rows - 1) * topology.spacing;
    const Position3 center{xm / 2, ym / 2, 0.0};
    const Position3 mid_south{xm / 2, 0.0, 0.0};
    const Position3 mid_north{xm / 2, ym, 0.0};
    const Position3 mid_west{0.0, ym / 2, 0.0};
    const Position3 mid_east{xm, ym / 2, 0.0};

    auto& a = topology.anchor_positions;
    a = {{0.0, 0.0, 0.0}, {xm, 0.0, 0.0}, {0.0, ym, 0.0}, {xm, ym, 0.0}};
    switch (count) {
        case 5: a.push_back(center); break;
        case 6: a.insert(a.end(), {mid_south, mid_north}); break;
        case 7: a.insert(a.end(), {mid_south, mid_north, center}); break;
        case 8: a.insert(a.end(), {mid_south, mid_north, mid_west, mid_east}); break;
        case 9: a.insert(a.end(), {mid_south, mid_north, mid_west, mid_east, center}); break;
        default: break;
    }
    return topology;
}

/// Displaces one nanonode. `grid_position` is its mounting-plane location,
/// `d` the box edge; results stay inside [0,d] x [0,d] x [0,d/2].
template <class Rng>
Position3 displace_node(const Position3& grid_position, double d, MobilityPattern pattern, Rng& rng) {
    switch (pattern) {
        case MobilityPattern::none:
            return grid_position;
        case MobilityPattern::random_box: {
            std::uniform_real_distribution<double> u(0.0, 1.0);
            const double x = d * u(rng);
            const double y = d * u(rng);
            const double z = 0.5 * d * u(rng);
            return {x, y, z};
        }
        case MobilityPattern::half_sphere:
        case MobilityPattern::half_cylinder: {
            const double x = std::clamp(grid_position.x, 0.0, d);
            const double y = std::clamp(grid_position.y, 0.0, d);
            const double u = 2.0 * x / d - 1.0;
            const double v = 2.0 * y / d - 1.0;
            const double radial = pattern == MobilityPattern::half_sphere ? 1.0 - u * u - v * v : 1.0 - u * u;
            return {x, y, 0.5 * d * std::sqrt(std::max(0.0, radial))};
        }
    }
    return grid_position;
}

template <class Rng>
std::vector<Position3> apply_mobility(const Topology& topology, MobilityPattern pattern, Rng& rng) {
    if (pattern != MobilityPattern::none && !(topology.extent_d > 0.0))
        throw std::invalid_argument("apply_mobility: mobility needs a grid with extent_d > 0");
    std::vector<Position3> out;
    out.reserve(topology.node_positions.size());
    for (const auto& p : topology.node_positions) out.push_back(displace_node(p, topology.extent_d, pattern, rng));
    return out;
}

}  // namespace thzloc
