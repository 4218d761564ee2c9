/// @file checks.hpp
/// @brief Self-checks of the kernel and the elliptic solver, shared by the
/// kernel-check / solver-check subcommands and the acceptance suite.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "helivort/geometry.hpp"

namespace helivort::checks {

struct CheckResult {
    std::string name;
    double measured = 0.0;
    double limit = 0.0;
    bool pass = false;
    std::string note;
};

struct CheckReport {
    std::vector<CheckResult> rows;

    bool pass() const;
    /// One aligned line per check: PASS/FAIL, name, measured, limit, note.
    std::string table() const;
};

struct KernelCheckOptions {
    std::vector<double> pitches{0.5, 1.0, 2.0};
    int points = 10000;
    std::uint64_t seed = 1;
    /// Points are drawn uniformly from the square [-radius, radius]^2.
    double radius = 2.0;
    /// Fault injection: the finite-difference reference for DT uses
    /// rho(s) (1 + rho_fault s) instead of rho. Zero checks the real kernel.
    double rho_fault = 0.0;
};

/// Eigenvalues of K, (Lambda^-1)^2 = K, DT against finite differences of T,
/// symmetry of G_K, and boundedness of |grad G_K| |x - y| near the diagonal.
CheckReport kernel_check(const KernelCheckOptions &opt);

struct SolverCheckOptions {
    std::vector<int> sizes{65, 129, 257};
    double h = 1.0;
    double radius = 2.0;
};

/// Smallest grid the solver checks accept.
inline constexpr int min_check_grid = 17;

/// L2 error of the solve for the manufactured stream (R^2 - |x|^2)^2.
double manufactured_l2_error(int n, double h, double radius);

/// Least-squares slope of -log(error) against log(n - 1), i.e. the order per
/// doubling of the node count.
double convergence_order(const std::vector<int> &sizes, const std::vector<double> &errors);

/// Manufactured-solution order, operator symmetry, and symmetry of the
/// regular part. ConfigError for fewer than two sizes or a size below
/// min_check_grid.
CheckReport solver_check(const SolverCheckOptions &opt);

struct GreenCheck {
    /// max |S(., y0)| and max |grad S(., y0)| on the interior rings.
    double max_s = 0.0;
    double max_grad_s = 0.0;
    /// max |Psi - mass G_K(., y0) - S(., y0)| on the rings away from y0, with
    /// the singular part integrated against the Gaussian.
    double mismatch = 0.0;
    /// |S(x0, y0) - S(y0, x0)| / |S(x0, y0)| for x0 = (-0.4, 0.6).
    double symmetry = 0.0;
    bool pass = false;
};

/// Grid solve for a Gaussian of the given width at y0 compared with the
/// decomposition G_K + S. Rings at radii 0.5, 0.8, 1.0, 1.2, 1.5 of the disk
/// of radius 2; points within 0.25 of y0 are skipped for the mismatch.
GreenCheck green_decomposition_check(int n, double h, const Point2 &y0, double width);

}  // namespace helivort::checks
