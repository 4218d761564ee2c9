/// @file domain_solver.hpp
/// @brief Bounded-domain elliptic backend on a uniform node-centred grid.
///
/// Discretizes L Psi = div(K grad Psi) = omega on the disk B(0, R_U) with
/// Psi = 0 outside the disk. Nodes inside the open disk are unknowns, every
/// other node is a Dirichlet node (simple masking, first order at the edge).
///
/// The operator comes from the discrete energy
///
///     sum_{x-faces} a11 (du)^2 + sum_{y-faces} a22 (du)^2 + sum_{cells} 2 a12 gx gy s^2
///
/// with a11/a22 sampled at face midpoints and a12 at cell centres. Its
/// Hessian is a symmetric 9-point stencil approximating -div(K grad .).

#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "helivort/geometry.hpp"
#include "helivort/particles.hpp"

namespace helivort {

enum class NodeKind : std::uint8_t { interior, boundary, exterior };

/// Uniform grid on the square [-R - 2s, R + 2s]^2 with n nodes per side,
/// s = 2R/(n - 5). The two outer layers keep every interior node's stencil
/// and every central difference inside the box.
class Grid {
public:
    static std::shared_ptr<const Grid> covering(const DiskDomain &domain, int n);

    int n() const { return n_; }
    double spacing() const { return spacing_; }
    Point2 origin() const { return origin_; }
    double disk_radius() const { return radius_; }
    std::size_t node_count() const { return static_cast<std::size_t>(n_) * n_; }

    std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * n_ + i; }
    Point2 node(int i, int j) const { return {origin_.x + i * spacing_, origin_.y + j * spacing_}; }
    NodeKind kind(int i, int j) const { return mask_[index(i, j)]; }
    const std::vector<NodeKind> &mask() const { return mask_; }

private:
    Grid(double radius, int n);

    int n_;
    double spacing_;
    double radius_;
    Point2 origin_;
    std::vector<NodeKind> mask_;
};

/// Node values on a grid.
struct ScalarField {
    std::shared_ptr<const Grid> grid;
    std::vector<double> values;

    double at(int i, int j) const { return values[grid->index(i, j)]; }
};

/// Bilinear (cloud-in-cell) deposition of circulation divided by the cell
/// area, so that spacing^2 * sum(values) equals the total circulation.
/// Throws DomainError for a particle outside the grid box.
ScalarField deposit(const ParticleSystem &particles, std::shared_ptr<const Grid> grid);

/// Assembled discretization of -div(K grad .) on the disk.
class EllipticSystem {
public:
    EllipticSystem(std::shared_ptr<const Grid> grid, HelixParams params);

    const std::shared_ptr<const Grid> &grid() const { return grid_; }
    const HelixParams &params() const { return params_; }

    /// Stencil row of node (i,j); entry (dj+1)*3 + (di+1) couples to (i+di, j+dj).
    const std::array<double, 9> &row(int i, int j) const { return stencil_[grid_->index(i, j)]; }

    /// (A u) on interior nodes, zero elsewhere. u holds values on all nodes.
    std::vector<double> apply(std::span<const double> u) const;

    /// Discrete energy s^2 * u^T A u over all nodes, i.e. the quadrature of K grad u . grad u.
    double energy(std::span<const double> u) const;

    /// Solve A u = rhs on interior nodes with u fixed to `dirichlet` on all
    /// other nodes (empty span means zero). Jacobi-preconditioned CG to the
    /// given relative residual; throws SolverError after max_iterations.
    std::vector<double> solve(std::span<const double> rhs, std::span<const double> dirichlet = {},
                              double tolerance = 1e-10, int max_iterations = 0) const;

    /// Iterations used by the last solve (0 for trivial right-hand sides).
    int last_iterations() const { return last_iterations_; }

private:
    std::shared_ptr<const Grid> grid_;
    HelixParams params_;
    std::vector<std::array<double, 9>> stencil_;
    mutable int last_iterations_ = 0;
};

/// Psi with div(K grad Psi) = omega inside the disk and Psi = 0 outside.
ScalarField solve_stream(const ScalarField &omega, const EllipticSystem &system);

/// v = grad^perp Psi = (-d2 Psi, d1 Psi) by central differences at nodes,
/// bilinearly interpolated to the positions. Throws DomainError outside the grid.
std::vector<Vec2> curl_interp(const ScalarField &psi, std::span<const Point2> positions);

/// Bilinear interpolation of a scalar field. Throws DomainError outside the grid.
double interpolate(const ScalarField &field, const Point2 &x);

/// div(K grad q)(x) for q(x) = sqrt(det DT(x)) / f(x) = sqrt(|X|/h).
double divergence_k_grad_q(const Point2 &x, const HelixParams &params);

/// Regular part x -> S_{K,U}(x, y) of the bounded-domain Green's function,
/// from the Dirichlet problem L S = -(q(y)/2pi) ln|T x - T y| div(K grad q)(x),
/// S = -G_K(., y) on the boundary nodes.
ScalarField regular_part_probe(const Point2 &y, const EllipticSystem &system);

/// Debug export: rows "index,x1,x2,value".
void write_field_csv(const ScalarField &field, const std::string &path);

}  // namespace helivort
