/// @file flow.hpp
/// @brief Velocity of the particle system.
///
/// The direct backend sums the free-space kernel G_K over all particles with
/// the flattened distance regularized, |T x - T y|^2 -> |T x - T y|^2 + delta^2.
/// The velocity splits exactly into
///
///     v_K(x) = sum_j w_j H(x,y_j) (DT(x)(T x - T y_j) / q_j)^perp
///     v_L(x) = x^perp / (2|X|^2) * psi(x),   psi(x) = sum_j w_j H(x,y_j) ln(q_j)/2
///
/// The grid backend solves div(K grad Psi) = omega on the disk and therefore
/// also carries the regular part v_R of the bounded-domain Green's function.

#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "helivort/domain_solver.hpp"
#include "helivort/particles.hpp"

namespace helivort {

enum class Backend { direct, grid };

/// "direct" or "grid"; anything else is a ConfigError.
Backend parse_backend(const std::string &name);
std::string to_string(Backend backend);

/// Particle-mesh velocity: deposit, solve, differentiate, interpolate.
class GridBackend {
public:
    GridBackend(const HelixParams &params, const DiskDomain &domain, int n);

    const EllipticSystem &system() const { return system_; }

    ScalarField stream(const ParticleSystem &sys) const;
    std::vector<Vec2> velocity(const ParticleSystem &sys, std::span<const Point2> points) const;

    /// Quadrature of K grad Psi . grad Psi over the grid for the deposited vorticity.
    double energy(const ParticleSystem &sys) const;

private:
    EllipticSystem system_;
};

namespace flow {

/// Regularized H(x,y) ln(|T x - T y|^2 + delta^2)/2.
double regularized_green(const Point2 &x, const Point2 &y, const HelixParams &p, double delta);

/// Regularized sum of w_j grad_x^perp G_K(x, y_j) at arbitrary points.
std::vector<Vec2> velocity_direct(const ParticleSystem &sys, std::span<const Point2> points);

/// velocity_direct evaluated at the particles themselves, using pair symmetry.
std::vector<Vec2> velocity_direct(const ParticleSystem &sys);

/// Regularized psi(x) = sum_j w_j H(x,y_j) ln(q_j)/2.
std::vector<double> stream_direct(const ParticleSystem &sys, std::span<const Point2> points);

/// stream_direct at the particles themselves (self pair included as ln(delta)).
std::vector<double> stream_direct(const ParticleSystem &sys);

struct VelocitySplit {
    std::vector<Vec2> v_k;
    std::vector<Vec2> v_l;
    std::vector<Vec2> v_r;
    /// False in direct mode: v_r is then all zeros and carries no information.
    bool v_r_available = false;
};

/// Three-way split at the given points. psi must hold the local energy at the
/// same points. With a grid backend, v_r is the grid velocity minus v_K + v_L.
VelocitySplit velocity_split(const ParticleSystem &sys, std::span<const Point2> points,
                             std::span<const double> psi, const GridBackend *grid = nullptr);

/// Velocity induced by the particles of every blob except `blob`.
std::vector<Vec2> exterior_field(const ParticleSystem &sys, int blob, std::span<const Point2> points);

/// Velocity induced by the particles of `blob` alone.
std::vector<Vec2> own_blob_field(const ParticleSystem &sys, int blob, std::span<const Point2> points);

/// 1/|ln eps|, the factor between physical and rescaled velocity. Requires 0 < eps < 1.
double time_rescale(double eps);

std::vector<Vec2> rescaled_velocity(std::span<const Vec2> v, double eps);

}  // namespace flow

/// Backend-dispatching evaluator for the rescaled particle velocities.
class VelocityField {
public:
    VelocityField(Backend backend, const ParticleSystem &prototype, int grid_n);

    Backend backend() const { return backend_; }
    const GridBackend *grid() const { return grid_ ? grid_.get() : nullptr; }

    /// Physical velocity at the particle positions.
    std::vector<Vec2> at_particles(const ParticleSystem &sys) const;

private:
    Backend backend_;
    std::shared_ptr<const GridBackend> grid_;
};

}  // namespace helivort
