/// @file geometry.hpp
/// @brief Small fixed-size vector/matrix types for the helical cross-section.
///
/// Everything here is a plain value type. `Vec2` doubles as a point in the
/// 2D cross-section, `Vec3` as a point of the 3D ambient space.

#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>

namespace helivort {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    constexpr Vec2 &operator+=(const Vec2 &o) { x += o.x; y += o.y; return *this; }
    constexpr Vec2 &operator-=(const Vec2 &o) { x -= o.x; y -= o.y; return *this; }
    constexpr Vec2 &operator*=(double s) { x *= s; y *= s; return *this; }
};

using Point2 = Vec2;

constexpr Vec2 operator+(Vec2 a, const Vec2 &b) { return a += b; }
constexpr Vec2 operator-(Vec2 a, const Vec2 &b) { return a -= b; }
constexpr Vec2 operator-(const Vec2 &a) { return {-a.x, -a.y}; }
constexpr Vec2 operator*(double s, Vec2 a) { return a *= s; }
constexpr Vec2 operator*(Vec2 a, double s) { return a *= s; }
constexpr bool operator==(const Vec2 &a, const Vec2 &b) { return a.x == b.x && a.y == b.y; }

constexpr double dot(const Vec2 &a, const Vec2 &b) { return a.x * b.x + a.y * b.y; }
constexpr double norm2(const Vec2 &a) { return dot(a, a); }
inline double norm(const Vec2 &a) { return std::hypot(a.x, a.y); }

/// (a,b)^perp = (-b,a), i.e. counterclockwise quarter turn.
constexpr Vec2 perp(const Vec2 &a) { return {-a.y, a.x}; }

/// Symmetric 2x2 matrix; a21 is a12 by construction.
struct SymMat2 {
    double a11 = 0.0;
    double a12 = 0.0;
    double a22 = 0.0;

    static constexpr SymMat2 identity() { return {1.0, 0.0, 1.0}; }

    constexpr double det() const { return a11 * a22 - a12 * a12; }
    constexpr double trace() const { return a11 + a22; }
};

constexpr Vec2 operator*(const SymMat2 &m, const Vec2 &v) {
    return {m.a11 * v.x + m.a12 * v.y, m.a12 * v.x + m.a22 * v.y};
}
constexpr SymMat2 operator*(double s, const SymMat2 &m) { return {s * m.a11, s * m.a12, s * m.a22}; }
constexpr SymMat2 operator+(const SymMat2 &a, const SymMat2 &b) {
    return {a.a11 + b.a11, a.a12 + b.a12, a.a22 + b.a22};
}

/// Product of two symmetric matrices that commute (true for all the radial
/// matrices built from I and N(x)); the result is symmetric again.
constexpr SymMat2 commuting_product(const SymMat2 &a, const SymMat2 &b) {
    return {a.a11 * b.a11 + a.a12 * b.a12, a.a11 * b.a12 + a.a12 * b.a22,
            a.a12 * b.a12 + a.a22 * b.a22};
}

/// Eigenvalues in ascending order.
inline std::pair<double, double> eigenvalues(const SymMat2 &m) {
    const double half_tr = 0.5 * m.trace();
    const double disc = std::hypot(0.5 * (m.a11 - m.a22), m.a12);
    return {half_tr - disc, half_tr + disc};
}

/// General 2x2 matrix (row-major).
struct Mat2 {
    double m11 = 1.0, m12 = 0.0;
    double m21 = 0.0, m22 = 1.0;
};

constexpr Vec2 operator*(const Mat2 &m, const Vec2 &v) {
    return {m.m11 * v.x + m.m12 * v.y, m.m21 * v.x + m.m22 * v.y};
}
constexpr Mat2 operator*(const Mat2 &a, const Mat2 &b) {
    return {a.m11 * b.m11 + a.m12 * b.m21, a.m11 * b.m12 + a.m12 * b.m22,
            a.m21 * b.m11 + a.m22 * b.m21, a.m21 * b.m12 + a.m22 * b.m22};
}

/// Counterclockwise rotation by theta: (cos, -sin; sin, cos).
inline Mat2 rotation_matrix(double theta) {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    return {c, -s, s, c};
}

inline Vec2 rotate(const Vec2 &v, double theta) { return rotation_matrix(theta) * v; }

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

using Point3 = Vec3;

constexpr Vec3 operator+(const Vec3 &a, const Vec3 &b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
constexpr Vec3 operator-(const Vec3 &a, const Vec3 &b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
constexpr Vec3 operator*(double s, const Vec3 &a) { return {s * a.x, s * a.y, s * a.z}; }
constexpr double dot(const Vec3 &a, const Vec3 &b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline double norm(const Vec3 &a) { return std::sqrt(dot(a, a)); }
constexpr Vec3 cross(const Vec3 &a, const Vec3 &b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

/// Helix pitch h > 0. Every kernel quantity depends on it.
class HelixParams {
public:
    explicit HelixParams(double h) : h_(h) {
        if (!(h > 0.0) || !std::isfinite(h)) {
            throw std::invalid_argument("helix pitch h must be finite and > 0");
        }
    }

    double h() const { return h_; }

private:
    double h_;
};

}  // namespace helivort
