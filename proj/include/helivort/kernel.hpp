/// @file kernel.hpp
/// @brief Closed-form geometry of the helical 2D reduction.
///
/// The elliptic operator of the reduced problem is div(K grad .) with
///
///     K(x) = I - N(x) / (|x|^2 + h^2),   N(x) = x x^T,
///
/// whose eigenvalues are 1 (direction x^perp) and h^2/|X|^2 (direction x),
/// |X| = sqrt(|x|^2 + h^2). The radial map T(x) = rho(|x|^2) x flattens the
/// anisotropy, DT(x) = f(x) Lambda(x) = f(x) K(x)^{-1/2}, so that the
/// singular part of the Green's function is an exact logarithm:
///
///     G_K(x,y) = H(x,y) ln|T(x) - T(y)|,   H(x,y) = sqrt(|X||Y|) / (2 pi h).
///
/// All functions are pure in (x, y, h).

#pragma once

#include "helivort/geometry.hpp"

namespace helivort::kernel {

/// sqrt(|x|^2 + h^2).
double lifted_norm(const Point2 &x, const HelixParams &p);

/// N(x) = x x^T.
SymMat2 n_matrix(const Point2 &x);

SymMat2 k_matrix(const Point2 &x, const HelixParams &p);

/// Lambda(x) = I + N(x) / (h|X| + h^2), the inverse square root of K(x).
SymMat2 lambda_matrix(const Point2 &x, const HelixParams &p);

/// Lambda(x)^{-1} = I - N(x) / (h|X| + |X|^2).
SymMat2 lambda_inverse(const Point2 &x, const HelixParams &p);

/// Logarithmic derivative of rho: g(s) = 1 / (2 (h sqrt(s + h^2) + h^2)).
double rho_log_derivative(double s, const HelixParams &p);

/// rho(s) = exp(int_0^s g), evaluated in closed form
/// exp((w - h)/h) * 2h/(w + h), w = sqrt(s + h^2). Requires s >= 0.
double rho(double s, const HelixParams &p);

/// Radial factor f(x) = rho(|x|^2) >= 1.
double radial_factor(const Point2 &x, const HelixParams &p);

/// Flattening diffeomorphism T(x) = f(x) x.
Point2 diffeo(const Point2 &x, const HelixParams &p);

/// DT(x) = f(x) Lambda(x).
SymMat2 diffeo_jacobian(const Point2 &x, const HelixParams &p);

/// H(x,y) = sqrt(|X||Y|) / (2 pi h).
double h_weight(const Point2 &x, const Point2 &y, const HelixParams &p);

/// grad_x H(x,y) = (H/2) x / |X|^2.
Vec2 grad_h_weight(const Point2 &x, const Point2 &y, const HelixParams &p);

/// Free-space singular kernel H(x,y) ln|T(x) - T(y)|. Throws DomainError if x == y.
double green_free(const Point2 &x, const Point2 &y, const HelixParams &p);

/// grad_x G_K(x,y) = grad_x H ln|T x - T y| + H DT(x)(T x - T y)/|T x - T y|^2.
/// Throws DomainError if x == y.
Vec2 grad_green_free(const Point2 &x, const Point2 &y, const HelixParams &p);

/// (grad_x G_K(x,y))^perp, the velocity induced at x by a unit point vortex at y.
Vec2 grad_perp_green_free(const Point2 &x, const Point2 &y, const HelixParams &p);

}  // namespace helivort::kernel
