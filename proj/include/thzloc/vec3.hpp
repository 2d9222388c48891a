#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <utility>
#include <ostream>

namespace thzloc {

/// Cartesian point or displacement in meters.
struct Position3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    constexpr Position3& operator+=(const Position3& o) noexcept {
        x += o.x; y += o.y; z += o.z;
        return *this;
    }
    constexpr Position3& operator-=(const Position3& o) noexcept {
        x -= o.x; y -= o.y; z -= o.z;
        return *this;
    }
    constexpr Position3& operator*=(double s) noexcept {
        x *= s; y *= s; z *= s;
        return *this;
    }

    friend constexpr Position3 operator+(Position3 a, const Position3& b) noexcept { return a += b; }
    friend constexpr Position3 operator-(Position3 a, const Position3& b) noexcept { return a -= b; }
    friend constexpr Position3 operator*(Position3 a, double s) noexcept { return a *= s; }
    friend constexpr Position3 operator*(double s, Position3 a) noexcept { return a *= s; }
    friend constexpr bool operator==(const Position3&, const Position3&) = default;

    friend std::ostream& operator<<(std::ostream& os, const Position3& p) {
        return os << '(' << p.x << ", " << p.y << ", " << p.z << ')';
    }
};

constexpr double dot(const Position3& a, const Position3& b) noexcept {
    return a.x * b.x + a.y * b.y + a.z * b.z;
}

constexpr Position3 cross(const Position3& a, const Position3& b) noexcept {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double norm(const Position3& a) noexcept { return std::sqrt(dot(a, a)); }

inline double distance(const Position3& a, const Position3& b) noexcept { return norm(a - b); }

inline bool is_finite(const Position3& p) noexcept {
    return std::isfinite(p.x) && std::isfinite(p.y) && std::isfinite(p.z);
}

/// Small dense 3x3 helpers used by the solvers.
using Mat3 = std::array<std::array<double, 3>, 3>;

inline double determinant(const Mat3& m) noexcept {
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
           m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

/// Eigenvalues of a symmetric 3x3 matrix in ascending order (closed form).
inline std::array<double, 3> symmetric_eigenvalues(const Mat3& a) noexcept {
    const double p1 = a[0][1] * a[0][1] + a[0][2] * a[0][2] + a[1][2] * a[1][2];
    if (p1 == 0.0) {
        std::array<double, 3> d{a[0][0], a[1][1], a[2][2]};
        if (d[0] > d[1]) std::swap(d[0], d[1]);
        if (d[1] > d[2]) std::swap(d[1], d[2]);
        if (d[0] > d[1]) std::swap(d[0], d[1]);
        return d;
    }
    const double q = (a[0][0] + a[1][1] + a[2][2]) / 3.0;
    const double p2 = (a[0][0] - q) * (a[0][0] - q) + (a[1][1] - q) * (a[1][1] - q) +
                      (a[2][2] - q) * (a[2][2] - q) + 2.0 * p1;
    const double p = std::sqrt(p2 / 6.0);
    Mat3 b{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) b[i][j] = (a[i][j] - (i == j ? q : 0.0)) / p;
    double r = determinant(b) / 2.0;
    r = std::fmax(-1.0, std::fmin(1.0, r));
    const double pi = 3.14159265358979323846;
    const double phi = std::acos(r) / 3.0;
    const double e_hi = q + 2.0 * p * std::cos(phi);
    const double e_lo = q + 2.0 * p * std::cos(phi + 2.0 * pi / 3.0);
    const double e_mid = 3.0 * q - e_hi - e_lo;
    return {e_lo, e_mid, e_hi};
}

/// Condition number of a symmetric positive semi-definite matrix; infinity when singular.
inline double spd_condition_number(const Mat3& a) noexcept {
    const auto ev = symmetric_eigenvalues(a);
    if (ev[0] <= 0.0) return std::numeric_limits<double>::infinity();
    return ev[2] / ev[0];
}

/// Solves m * x = b by Cramer's rule. Caller checks conditioning.
inline Position3 solve3(const Mat3& m, const Position3& b) noexcept {
    const double det = determinant(m);
    auto replaced = [&](int col) {
        Mat3 c = m;
        const double v[3] = {b.x, b.y, b.z};
        for (int i = 0; i < 3; ++i) c[i][col] = v[i];
        return determinant(c) / det;
    };
    return {replaced(0), replaced(1), replaced(2)};
}

}  // namespace thzloc
