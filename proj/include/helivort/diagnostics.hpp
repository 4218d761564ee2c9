/// @file diagnostics.hpp
/// @brief Functionals of the particle vorticity and comparison with the helix model.
///
/// Per blob i with circulation gamma_i:
///
///     b    = (1/gamma) sum w_j y_j              centre of vorticity
///     I    = sum w_j |y_j - b|^2                inertia
///     J_k  = sum w_j |y_j|^k                    radial moments
///     R_t  = max ||y_j| - r0|                   radial spread about r0 = |z_{i,0}|
///
/// Globally E = -sum_{j != l} w_j w_l G_K(y_j, y_l) with the regularized log,
/// and psi(x) = sum_j w_j G_K(x, y_j).

#pragma once

#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "helivort/blob.hpp"
#include "helivort/flow.hpp"
#include "helivort/particles.hpp"

namespace helivort {

struct BlobDiagnostics {
    Point2 center;
    double inertia = 0.0;
    double j1 = 0.0;
    double j2 = 0.0;
    double radial_deviation = 0.0;
    double mass_outside = 0.0;
    /// sum_{j in blob} w_j (gamma psi_j - sum_{k in blob} w_k psi_k)^2.
    double psi_variance = 0.0;
};

struct DiagnosticsRecord {
    double t = 0.0;
    std::vector<BlobDiagnostics> blobs;
    double energy = 0.0;
    bool support_ok = true;
};

/// Annulus {x : ||x| - r| < eta}.
struct Annulus {
    double r = 0.0;
    double eta = 0.0;

    bool contains(const Point2 &x) const { return std::abs(norm(x) - r) < eta; }
};

namespace diagnostics {

Point2 center_of_mass(const ParticleSystem &sys, int blob);
double inertia(const ParticleSystem &sys, int blob);
double radial_moment(const ParticleSystem &sys, int blob, int k);

/// Free-space energy with the diagonal excluded.
double energy(const ParticleSystem &sys);

/// Energy of the deposited vorticity on the grid, the quadrature of K grad Psi . grad Psi.
double energy_grid(const ParticleSystem &sys, const GridBackend &grid);

/// psi at arbitrary points, regularized like the velocity.
std::vector<double> local_energy(const ParticleSystem &sys, std::span<const Point2> points);

/// Sum of the weights of `blob` at distance >= radius from `center`.
double mass_outside(const ParticleSystem &sys, int blob, const Point2 &center, double radius);

double max_radial_deviation(const ParticleSystem &sys, int blob, double r0);

/// r_eps = sqrt(ln|ln eps| / |ln eps|), the weak-localization radius.
double localization_radius(double eps);

/// Sharp bound 2 pi M (R^2/4 - R^2 ln R / 2), R = sqrt(gamma/(pi M)), for
/// -int ln|x - y| f(y) dy over 0 <= f <= M with int f = gamma. DomainError if R > 1.
double rearrangement_bound(double density_cap, double mass);

/// Half-width of the monitored annuli: a quarter of the smallest gap between
/// distinct centre radii and between each centre radius and the disk radius.
double support_half_width(const std::vector<BlobSpec> &specs, double disk_radius);

/// All per-blob functionals and the energy for one snapshot. `initial` holds
/// the initial centres (for r0 and the monitored annuli).
DiagnosticsRecord record(const ParticleSystem &sys, double t, const std::vector<BlobSpec> &initial,
                         double eta0);

struct Tolerances {
    double frequency = 0.15;
    double inertia_growth = 3.0;
    double mass_outside = 0.05;
};

struct BlobReport {
    double nu_theory = 0.0;
    double nu_fit = 0.0;
    double nu_relative_error = 0.0;
    double max_center_error = 0.0;
    double inertia_initial = 0.0;
    double max_inertia = 0.0;
    double max_radial_deviation = 0.0;
    double final_radial_deviation = 0.0;
    double max_mass_outside = 0.0;
    double max_j2_drift = 0.0;
    /// max |db/dt - law(b)| / max |law(b)| with law(b) = -gamma sqrt(r0^2+h^2)/(4 pi h) b^perp/|B|^2.
    double drift_law_residual = std::numeric_limits<double>::quiet_NaN();
    double max_psi_variance = 0.0;
    bool pass = false;
};

struct TheoryReport {
    std::vector<BlobReport> blobs;
    bool support_ok = true;
    bool pass = false;

    /// key=value lines, one quantity per line.
    std::string summary() const;
    /// Aligned table for humans.
    std::string table() const;
};

/// Least-squares slope of the unwrapped angle of b(t) over the second half of
/// the series.
double fitted_angular_velocity(std::span<const DiagnosticsRecord> series, int blob);

TheoryReport theory_compare(std::span<const DiagnosticsRecord> series, const std::vector<BlobSpec> &specs,
                            const HelixParams &p, const Tolerances &tol = {});

/// Header and rows of the diagnostics time series:
/// t, per blob b_x,b_y,I,J1,J2,R_t,mass_out, then E, support_ok, then per blob psi_var.
std::string csv_header(int blob_count);
std::string csv_row(const DiagnosticsRecord &r);
/// Inverse of csv_row; ConfigError on malformed input.
DiagnosticsRecord parse_csv_row(const std::string &line, int blob_count);

}  // namespace diagnostics
}  // namespace helivort
