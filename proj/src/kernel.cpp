#include "helivort/kernel.hpp"

#include <numbers>

#include "helivort/error.hpp"

namespace helivort::kernel {

namespace {

void require_distinct(const Point2 &x, const Point2 &y, const char *what) {
    if (x == y) {
        throw DomainError(std::string(what) + ": coincident points");
    }
}

}  // namespace

double lifted_norm(const Point2 &x, const HelixParams &p) {
    return std::sqrt(norm2(x) + p.h() * p.h());
}

SymMat2 n_matrix(const Point2 &x) { return {x.x * x.x, x.x * x.y, x.y * x.y}; }

SymMat2 k_matrix(const Point2 &x, const HelixParams &p) {
    const double h2 = p.h() * p.h();
    const double inv = 1.0 / (norm2(x) + h2);
    return {inv * (h2 + x.y * x.y), -inv * x.x * x.y, inv * (h2 + x.x * x.x)};
}

SymMat2 lambda_matrix(const Point2 &x, const HelixParams &p) {
    const double h = p.h();
    const double c = 1.0 / (h * lifted_norm(x, p) + h * h);
    return SymMat2::identity() + c * n_matrix(x);
}

SymMat2 lambda_inverse(const Point2 &x, const HelixParams &p) {
    const double big_x = lifted_norm(x, p);
    const double c = 1.0 / (p.h() * big_x + big_x * big_x);
    return SymMat2::identity() + (-c) * n_matrix(x);
}

double rho_log_derivative(double s, const HelixParams &p) {
    const double h = p.h();
    return 1.0 / (2.0 * (h * std::sqrt(s + h * h) + h * h));
}

double rho(double s, const HelixParams &p) {
    if (!(s >= 0.0)) {
        throw DomainError("rho: argument must be >= 0");
    }
    const double h = p.h();
    const double w = std::sqrt(s + h * h);
    // w - h = s / (w + h) avoids cancellation near s = 0.
    return std::exp(s / ((w + h) * h)) * (2.0 * h / (w + h));
}

double radial_factor(const Point2 &x, const HelixParams &p) { return rho(norm2(x), p); }

Point2 diffeo(const Point2 &x, const HelixParams &p) { return radial_factor(x, p) * x; }

SymMat2 diffeo_jacobian(const Point2 &x, const HelixParams &p) {
    return radial_factor(x, p) * lambda_matrix(x, p);
}

double h_weight(const Point2 &x, const Point2 &y, const HelixParams &p) {
    return std::sqrt(lifted_norm(x, p) * lifted_norm(y, p)) / (2.0 * std::numbers::pi * p.h());
}

Vec2 grad_h_weight(const Point2 &x, const Point2 &y, const HelixParams &p) {
    const double big_x2 = norm2(x) + p.h() * p.h();
    return (0.5 * h_weight(x, y, p) / big_x2) * x;
}

double green_free(const Point2 &x, const Point2 &y, const HelixParams &p) {
    require_distinct(x, y, "green_free");
    return h_weight(x, y, p) * std::log(norm(diffeo(x, p) - diffeo(y, p)));
}

Vec2 grad_green_free(const Point2 &x, const Point2 &y, const HelixParams &p) {
    require_distinct(x, y, "grad_green_free");
    const Vec2 diff = diffeo(x, p) - diffeo(y, p);
    const double d2 = norm2(diff);
    const double hw = h_weight(x, y, p);
    const Vec2 log_term = (0.5 * std::log(d2)) * grad_h_weight(x, y, p);
    const Vec2 flat_term = (hw / d2) * (diffeo_jacobian(x, p) * diff);
    return log_term + flat_term;
}

Vec2 grad_perp_green_free(const Point2 &x, const Point2 &y, const HelixParams &p) {
    return perp(grad_green_free(x, y, p));
}

}  // namespace helivort::kernel
