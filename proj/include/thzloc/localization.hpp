#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "thzloc/errors.hpp"
#include "thzloc/ranging.hpp"
#include "thzloc/vec3.hpp"

namespace thzloc {

/// True anchor positions (used to generate measurements) and the positions
/// the solver is told about (possibly perturbed).
struct AnchorSet {
    std::vector<Position3> positions;
    std::vector<Position3> reported_positions;

    static AnchorSet exact(std::vector<Position3> positions) {
        AnchorSet s;
        s.reported_positions = positions;
        s.positions = std::move(positions);
        return s;
    }
};

struct LocationEstimate {
    Position3 position;
    double residual_rms = 0.0;  // m
    bool converged = false;
    int iterations = 0;
};

struct TrilaterationOptions {
    /// Start point when the linearized system is ill-conditioned. Defaults
    /// to the anchor centroid lifted by half the anchors' horizontal half-extent.
    std::optional<Position3> fallback_guess;
    int max_iterations = 100;
    double step_tolerance = 1e-12;  // m
    double initial_damping = 1e-3;
    double max_condition = 1e8;
};

namespace detail {

inline double range_cost(std::span<const Position3> anchors, std::span<const double> distances, const Position3& p) {
    double cost = 0.0;
    for (std::size_t i = 0; i < anchors.size(); ++i) {
        const double r = distance(p, anchors[i]) - distances[i];
        cost += r * r;
    }
    return cost;
}

inline Position3 default_fallback(std::span<const Position3> anchors) {
    Position3 c;
    for (const auto& a : anchors) c += a;
    c *= 1.0 / static_cast<double>(anchors.size());
    double half_extent = 0.0;
    for (const auto& a : anchors) half_extent = std::max({half_extent, std::abs(a.x - c.x), std::abs(a.y - c.y)});
    return {c.x, c.y, c.z + half_extent / 2.0};
}

/// Closed-form start: subtract the first range equation from the others
/// and solve the resulting linear least-squares problem. Rejected when
/// cond(A) exceeds `max_condition`.
inline std::optional<Position3> linearized_guess(std::span<const Position3> anchors,
                                                 std::span<const double> distances, double max_condition) {
    const auto rows = static_cast<Eigen::Index>(anchors.size() - 1);
    Eigen::MatrixXd a(rows, 3);
    Eigen::VectorXd y(rows);
    const Position3& a0 = anchors[0];
    const double d0 = distances[0];
    for (Eigen::Index i = 0; i < rows; ++i) {
        const Position3& ai = anchors[static_cast<std::size_t>(i) + 1];
        const double di = distances[static_cast<std::size_t>(i) + 1];
        const Position3 row = 2.0 * (ai - a0);
        a.row(i) << row.x, row.y, row.z;
        y(i) = dot(ai, ai) - dot(a0, a0) - di * di + d0 * d0;
    }
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    if (!(sv(2) > 0.0) || !(sv(0) / sv(2) <= max_condition)) return std::nullopt;
    const Eigen::Vector3d x = svd.solve(y);
    const Position3 guess{x(0), x(1), x(2)};
    if (!is_finite(guess)) return std::nullopt;
    return guess;
}

struct AnchorPlane {
    Position3 origin;
    Position3 normal;      // unit, oriented toward +z
    double thickness = 0;  // max |distance| of an anchor from the plane
    double extent = 0;     // max distance of an anchor from the origin
};

/// Least-squares plane through the anchors (centroid + smallest principal axis).
inline std::optional<AnchorPlane> fit_anchor_plane(std::span<const Position3> anchors) {
    Position3 c;
    for (const auto& a : anchors) c += a;
    c *= 1.0 / static_cast<double>(anchors.size());
    Mat3 cov{};
    double extent = 0.0;
    for (const auto& a : anchors) {
        const Position3 v = a - c;
        extent = std::max(extent, norm(v));
        const double vv[3] = {v.x, v.y, v.z};
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) cov[i][j] += vv[i] * vv[j];
    }
    if (extent == 0.0) return std::nullopt;
    const double lambda_min = symmetric_eigenvalues(cov)[0];
    Position3 rows[3];
    for (int i = 0; i < 3; ++i)
        rows[i] = {cov[i][0] - (i == 0 ? lambda_min : 0.0), cov[i][1] - (i == 1 ? lambda_min : 0.0),
                   cov[i][2] - (i == 2 ? lambda_min : 0.0)};
    Position3 n;
    double best = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j)
            if (Position3 x = cross(rows[i], rows[j]); norm(x) > best) best = norm(x), n = x;
    if (best == 0.0) return std::nullopt;  // collinear anchors
    n *= 1.0 / best;
    if (n.z < 0.0 || (n.z == 0.0 && (n.y < 0.0 || (n.y == 0.0 && n.x < 0.0)))) n *= -1.0;
    double thickness = 0.0;
    for (const auto& a : anchors) thickness = std::max(thickness, std::abs(dot(n, a - c)));
    return AnchorPlane{c, n, thickness, extent};
}

struct SolverRun {
    Position3 position;
    double cost = 0.0;
    bool converged = false;
    int iterations = 0;
};

inline SolverRun levenberg(std::span<const Position3> anchors, std::span<const double> distances, Position3 p,
                           const TrilaterationOptions& options) {
    double cost = range_cost(anchors, distances, p);
    double lambda = options.initial_damping;
    SolverRun run;
    int it = 0;
    while (it < options.max_iterations) {
        ++it;
        if (cost == 0.0) {
            run.converged = true;
            break;
        }
        Mat3 h{};
        Position3 g;
        for (std::size_t i = 0; i < anchors.size(); ++i) {
            const Position3 diff = p - anchors[i];
            const double r = norm(diff);
            if (r == 0.0) continue;
            const Position3 j = diff * (1.0 / r);
            const double jv[3] = {j.x, j.y, j.z};
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b) h[a][b] += jv[a] * jv[b];
            g += j * (r - distances[i]);
        }
        const double scale = std::max((h[0][0] + h[1][1] + h[2][2]) / 3.0, 1e-300);
        Mat3 damped = h;
        for (int a = 0; a < 3; ++a) damped[a][a] += lambda * scale;
        const Position3 step = solve3(damped, g * -1.0);
        const double step_norm = norm(step);
        if (!std::isfinite(step_norm)) {
            lambda *= 10.0;
            continue;
        }
        const Position3 candidate = p + step;
        const double new_cost = range_cost(anchors, distances, candidate);
        if (new_cost < cost) {
            p = candidate;
            cost = new_cost;
            lambda = std::max(lambda / 10.0, 1e-300);
        } else {
            lambda *= 10.0;
        }
        if (step_norm < options.step_tolerance) {
            run.converged = true;
            break;
        }
    }
    run.position = p;
    run.cost = cost;
    run.iterations = it;
    return run;
}

/// Anchors thinner than this fraction of their extent count as a mounting
/// plane whose mirror ambiguity is resolved toward +z.
inline constexpr double kPlanarityRatio = 0.05;

}  // namespace detail

/// Least-squares position from ranges to at least four anchors: damped
/// Gauss-Newton (Levenberg) from a linearized start. With coplanar anchors
/// the mirror image is equally consistent; the solution on the +z side of
/// the anchor plane is returned.
inline LocationEstimate trilaterate(std::span<const Position3> anchors, std::span<const double> distances,
                                    const TrilaterationOptions& options = {}) {
    if (anchors.size() != distances.size())
        throw std::invalid_argument("trilaterate: anchor and distance counts differ");
    if (anchors.size() < 4) throw GeometryError("trilaterate: unlocalizable, fewer than 4 ranges");
    for (double d : distances)
        if (!(d >= 0.0) || !std::isfinite(d)) throw std::invalid_argument("trilaterate: ranges must be finite and >= 0");

    const Position3 start = detail::linearized_guess(anchors, distances, options.max_condition)
                                .value_or(options.fallback_guess.value_or(detail::default_fallback(anchors)));
    detail::SolverRun run = detail::levenberg(anchors, distances, start, options);

    if (auto plane = detail::fit_anchor_plane(anchors); plane && plane->thickness <= detail::kPlanarityRatio * plane->extent) {
        const double side = dot(plane->normal, run.position - plane->origin);
        if (side < 0.0) {
            const Position3 mirrored = run.position - plane->normal * (2.0 * side);
            if (plane->thickness == 0.0) {
                run.position = mirrored;
            } else {
                const int used = run.iterations;
                detail::SolverRun again = detail::levenberg(anchors, distances, mirrored, options);
                again.iterations += used;
                if (dot(plane->normal, again.position - plane->origin) >= 0.0) run = again;
            }
        }
    }

    LocationEstimate est;
    est.position = run.position;
    est.converged = run.converged;
    est.iterations = run.iterations;
    est.residual_rms =
        std::sqrt(detail::range_cost(anchors, distances, run.position) / static_cast<double>(anchors.size()));
    return est;
}

inline LocationEstimate trilaterate(const AnchorSet& anchors, std::span<const double> distances,
                                    const TrilaterationOptions& options = {}) {
    return trilaterate(std::span<const Position3>(anchors.reported_positions), distances, options);
}

/// Same solver fed with ranges inverted from received signal strength.
inline LocationEstimate rss_trilaterate(const AnchorSet& anchors, std::span<const double> rss_distances,
                                        const TrilaterationOptions& options = {}) {
    return trilaterate(anchors, rss_distances, options);
}

/// Point minimizing the summed squared distance to the bearing rays.
inline LocationEstimate aoa_triangulate(std::span<const Position3> anchors, std::span<const Bearing> bearings) {
    if (anchors.size() != bearings.size())
        throw std::invalid_argument("aoa_triangulate: anchor and bearing counts differ");
    if (anchors.size() < 2) throw GeometryError("aoa_triangulate: needs at least 2 bearings");
    Mat3 m{};
    Position3 rhs;
    std::vector<Position3> dirs;
    dirs.reserve(bearings.size());
    for (std::size_t i = 0; i < anchors.size(); ++i) {
        const Position3 u = unit_vector(bearings[i]);
        dirs.push_back(u);
        const double uv[3] = {u.x, u.y, u.z};
        const double av[3] = {anchors[i].x, anchors[i].y, anchors[i].z};
        double pa[3] = {0, 0, 0};
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) {
                const double proj = (a == b ? 1.0 : 0.0) - uv[a] * uv[b];
                m[a][b] += proj;
                pa[a] += proj * av[b];
            }
        rhs += Position3{pa[0], pa[1], pa[2]};
    }
    if (!(spd_condition_number(m) <= 1e12)) throw GeometryError("aoa_triangulate: bearings are parallel");
    LocationEstimate est;
    est.position = solve3(m, rhs);
    est.converged = true;
    double sq = 0.0;
    for (std::size_t i = 0; i < anchors.size(); ++i) {
        const Position3 v = est.position - anchors[i];
        const Position3 perp = v - dirs[i] * dot(v, dirs[i]);
        sq += dot(perp, perp);
    }
    est.residual_rms = std::sqrt(sq / static_cast<double>(anchors.size()));
    return est;
}

inline LocationEstimate aoa_triangulate(const AnchorSet& anchors, std::span<const Bearing> bearings) {
    return aoa_triangulate(std::span<const Position3>(anchors.reported_positions), bearings);
}

/// Reported positions = true positions + i.i.d. Normal(0, sigma) per axis.
template <class Rng>
AnchorSet inject_anchor_error(const AnchorSet& anchors, double sigma_per_axis, Rng& rng) {
    if (!(sigma_per_axis >= 0.0)) throw std::invalid_argument("inject_anchor_error: sigma must be >= 0");
    AnchorSet out;
    out.positions = anchors.positions;
    out.reported_positions = anchors.positions;
    if (sigma_per_axis == 0.0) return out;
    std::normal_distribution<double> noise(0.0, sigma_per_axis);
    for (auto& p : out.reported_positions) {
        p.x += noise(rng);
        p.y += noise(rng);
        p.z += noise(rng);
    }
    return out;
}

inline double localization_error(const Position3& true_position, const LocationEstimate& estimate) {
    return distance(true_position, estimate.position);
}

}  // namespace thzloc
