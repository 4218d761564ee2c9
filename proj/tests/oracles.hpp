/// @file oracles.hpp
/// @brief Test-only reference computations, independent of the library code paths.

#pragma once

#include <cmath>
#include <functional>

#include "helivort/geometry.hpp"

namespace helivort::test {

/// Adaptive Simpson quadrature of f over [a, b].
inline double adaptive_simpson(const std::function<double(double)> &f, double a, double b,
                               double tol = 1e-13, int depth = 50) {
    struct Rec {
        static double run(const std::function<double(double)> &f, double a, double b, double fa,
                          double fm, double fb, double whole, double tol, int depth) {
            const double m = 0.5 * (a + b);
            const double lm = 0.5 * (a + m);
            const double rm = 0.5 * (m + b);
            const double flm = f(lm);
            const double frm = f(rm);
            const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
            const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
            const double delta = left + right - whole;
            if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
                return left + right + delta / 15.0;
            }
            return run(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
                   run(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
        }
    };
    const double fa = f(a);
    const double fb = f(b);
    const double fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return Rec::run(f, a, b, fa, fm, fb, whole, tol, depth);
}

/// rho(s) = exp(int_0^s g(u) du), g(u) = 1/(2(h sqrt(u+h^2) + h^2)), by quadrature.
inline double rho_by_quadrature(double s, double h) {
    const auto g = [h](double u) { return 1.0 / (2.0 * (h * std::sqrt(u + h * h) + h * h)); };
    return std::exp(adaptive_simpson(g, 0.0, s));
}

/// Central-difference Jacobian of a map R^2 -> R^2; returns row-major (d f_i / d x_j).
inline Mat2 fd_jacobian(const std::function<Vec2(Vec2)> &f, Vec2 x, double step) {
    const Vec2 dx{step, 0.0};
    const Vec2 dy{0.0, step};
    const Vec2 cx = (1.0 / (2.0 * step)) * (f(x + dx) - f(x - dx));
    const Vec2 cy = (1.0 / (2.0 * step)) * (f(x + dy) - f(x - dy));
    return {cx.x, cy.x, cx.y, cy.y};
}

inline Vec2 fd_gradient(const std::function<double(Vec2)> &f, Vec2 x, double step) {
    const Vec2 dx{step, 0.0};
    const Vec2 dy{0.0, step};
    return {(f(x + dx) - f(x - dx)) / (2.0 * step), (f(x + dy) - f(x - dy)) / (2.0 * step)};
}

/// Uniform-disk second moment about its center: int |y|^2 / (pi eps^2) = eps^2 / 2.
inline double uniform_disk_second_moment(double eps) { return 0.5 * eps * eps; }

}  // namespace helivort::test
