#include "helivort/flow.hpp"

#include <cmath>
#include <numbers>

#include "helivort/detail/pair_sums.hpp"
#include "helivort/error.hpp"
#include "helivort/kernel.hpp"

namespace helivort {

Backend parse_backend(const std::string &name) {
    if (name == "direct") return Backend::direct;
    if (name == "grid") return Backend::grid;
    throw ConfigError("unknown backend '" + name + "' (expected direct or grid)");
}

std::string to_string(Backend backend) { return backend == Backend::direct ? "direct" : "grid"; }

GridBackend::GridBackend(const HelixParams &params, const DiskDomain &domain, int n)
    : system_(Grid::covering(domain, n), params) {}

ScalarField GridBackend::stream(const ParticleSystem &sys) const {
    return solve_stream(deposit(sys, system_.grid()), system_);
}

std::vector<Vec2> GridBackend::velocity(const ParticleSystem &sys, std::span<const Point2> points) const {
    return curl_interp(stream(sys), points);
}

double GridBackend::energy(const ParticleSystem &sys) const { return system_.energy(stream(sys).values); }

namespace {

template <class Keep>
detail::SourceArrays sources(const ParticleSystem &sys, Keep keep) {
    detail::SourceArrays src;
    const HelixParams &p = sys.params;
    for (std::size_t j = 0; j < sys.size(); ++j) {
        if (!keep(j)) continue;
        const Point2 &y = sys.positions[j];
        const Point2 ty = kernel::diffeo(y, p);
        src.tx.push_back(ty.x);
        src.ty.push_back(ty.y);
        src.strength.push_back(sys.weights[j] * std::sqrt(kernel::lifted_norm(y, p)));
    }
    return src;
}

detail::SourceArrays all_sources(const ParticleSystem &sys) { return detail::flattened_sources(sys); }

detail::TargetSums sums_at(std::span<const Point2> points, const detail::SourceArrays &src,
                           const HelixParams &p, double delta) {
    std::vector<double> tx(points.size());
    std::vector<double> ty(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        const Point2 t = kernel::diffeo(points[i], p);
        tx[i] = t.x;
        ty[i] = t.y;
    }
    return detail::pair_sums(tx, ty, src, delta * delta);
}

}  // namespace

namespace detail {

SourceArrays flattened_sources(const ParticleSystem &sys) {
    return sources(sys, [](std::size_t) { return true; });
}

}  // namespace detail

namespace flow {

namespace {

double prefactor(const Point2 &x, const HelixParams &p) {
    return std::sqrt(kernel::lifted_norm(x, p)) / (2.0 * std::numbers::pi * p.h());
}

Vec2 v_k_from(const Point2 &x, const HelixParams &p, double flat_x, double flat_y) {
    return prefactor(x, p) * perp(kernel::diffeo_jacobian(x, p) * Vec2{flat_x, flat_y});
}

Vec2 v_l_from(const Point2 &x, const HelixParams &p, double psi) {
    return psi / (2.0 * norm2(x) + 2.0 * p.h() * p.h()) * perp(x);
}

std::vector<Vec2> velocity_from(std::span<const Point2> points, const detail::TargetSums &sums,
                                const HelixParams &p) {
    std::vector<Vec2> v(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        const Point2 &x = points[i];
        const double psi = prefactor(x, p) * sums.log_sum[i];
        v[i] = v_k_from(x, p, sums.flat_x[i], sums.flat_y[i]) + v_l_from(x, p, psi);
    }
    return v;
}

void check_blob(const ParticleSystem &sys, int blob) {
    if (blob < 0 || blob >= sys.blob_count()) {
        throw ConfigError("unknown blob index " + std::to_string(blob));
    }
}

}  // namespace

double regularized_green(const Point2 &x, const Point2 &y, const HelixParams &p, double delta) {
    const double q = norm2(kernel::diffeo(x, p) - kernel::diffeo(y, p)) + delta * delta;
    return kernel::h_weight(x, y, p) * 0.5 * std::log(q);
}

std::vector<Vec2> velocity_direct(const ParticleSystem &sys, std::span<const Point2> points) {
    return velocity_from(points, sums_at(points, all_sources(sys), sys.params, sys.delta), sys.params);
}

std::vector<Vec2> velocity_direct(const ParticleSystem &sys) {
    const auto sums = detail::pair_sums_self(all_sources(sys), sys.delta * sys.delta);
    return velocity_from(sys.positions, sums, sys.params);
}

std::vector<double> stream_direct(const ParticleSystem &sys) {
    const auto sums = detail::pair_sums_self(all_sources(sys), sys.delta * sys.delta);
    std::vector<double> psi(sys.size());
    for (std::size_t i = 0; i < sys.size(); ++i) psi[i] = prefactor(sys.positions[i], sys.params) * sums.log_sum[i];
    return psi;
}

std::vector<double> stream_direct(const ParticleSystem &sys, std::span<const Point2> points) {
    const auto sums = sums_at(points, all_sources(sys), sys.params, sys.delta);
    std::vector<double> psi(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        psi[i] = prefactor(points[i], sys.params) * sums.log_sum[i];
    }
    return psi;
}

VelocitySplit velocity_split(const ParticleSystem &sys, std::span<const Point2> points,
                             std::span<const double> psi, const GridBackend *grid) {
    if (psi.size() != points.size()) {
        throw ConfigError("velocity_split: " + std::to_string(psi.size()) + " psi values for " +
                          std::to_string(points.size()) + " points");
    }
    const HelixParams &p = sys.params;
    const auto sums = sums_at(points, all_sources(sys), p, sys.delta);
    VelocitySplit out;
    out.v_k.resize(points.size());
    out.v_l.resize(points.size());
    out.v_r.assign(points.size(), Vec2{});
    for (std::size_t i = 0; i < points.size(); ++i) {
        out.v_k[i] = v_k_from(points[i], p, sums.flat_x[i], sums.flat_y[i]);
        out.v_l[i] = v_l_from(points[i], p, psi[i]);
    }
    if (grid != nullptr) {
        const auto total = grid->velocity(sys, points);
        for (std::size_t i = 0; i < points.size(); ++i) out.v_r[i] = total[i] - out.v_k[i] - out.v_l[i];
        out.v_r_available = true;
    }
    return out;
}

std::vector<Vec2> exterior_field(const ParticleSystem &sys, int blob, std::span<const Point2> points) {
    check_blob(sys, blob);
    const auto src = sources(sys, [&](std::size_t j) { return sys.blob_id[j] != blob; });
    return velocity_from(points, sums_at(points, src, sys.params, sys.delta), sys.params);
}

std::vector<Vec2> own_blob_field(const ParticleSystem &sys, int blob, std::span<const Point2> points) {
    check_blob(sys, blob);
    const auto src = sources(sys, [&](std::size_t j) { return sys.blob_id[j] == blob; });
    return velocity_from(points, sums_at(points, src, sys.params, sys.delta), sys.params);
}

double time_rescale(double eps) {
    if (!(eps > 0.0 && eps < 1.0)) {
        throw DomainError("time rescaling needs 0 < eps < 1, got " + std::to_string(eps));
    }
    return 1.0 / std::abs(std::log(eps));
}

std::vector<Vec2> rescaled_velocity(std::span<const Vec2> v, double eps) {
    const double c = time_rescale(eps);
    std::vector<Vec2> out(v.begin(), v.end());
    for (Vec2 &u : out) u *= c;
    return out;
}

}  // namespace flow

VelocityField::VelocityField(Backend backend, const ParticleSystem &prototype, int grid_n) : backend_(backend) {
    if (backend == Backend::grid) {
        grid_ = std::make_shared<GridBackend>(prototype.params, prototype.domain, grid_n);
    }
}

std::vector<Vec2> VelocityField::at_particles(const ParticleSystem &sys) const {
    if (backend_ == Backend::grid) return grid_->velocity(sys, sys.positions);
    return flow::velocity_direct(sys);
}

}  // namespace helivort
