/// @file reconstruct3d.hpp
/// @brief Lift of the scalar cross-section vorticity to the 3D helical field.
///
/// A helical flow without swirl has vorticity parallel to xi(x) = (-x2, x1, h):
///
///     curl U(x) = (1/h) omega(R_{-x3/h}(x1, x2)) xi(x)
///
/// so the 3D field is fixed by omega on the cross-section. omega itself is
/// estimated from the particles by a Gaussian kernel density.

#pragma once

#include <span>
#include <string>
#include <vector>

#include "helivort/blob.hpp"
#include "helivort/particles.hpp"

namespace helivort {
namespace reconstruct {

/// xi(x) = (-x2, x1, h), the tangent of the helices through x.
Vec3 xi_field(const Point3 &x, const HelixParams &p);

/// S_theta x = (R_theta (x1, x2), x3 + h theta).
Point3 helical_map(double theta, const Point3 &x, const HelixParams &p);

/// omega(x) = sum_j w_j exp(-|x - y_j|^2 / (2 b^2)) / (2 pi b^2).
/// Sources further than 9 b away are skipped (their weight is below 1e-17).
class VorticityDensity {
public:
    VorticityDensity(const ParticleSystem &sys, double bandwidth);

    double bandwidth() const { return bandwidth_; }
    double operator()(const Point2 &x) const;

private:
    std::vector<Point2> positions_;
    std::vector<double> weights_;
    double bandwidth_;
};

/// curl U at each sample.
std::vector<Vec3> vorticity3d(std::span<const Point3> samples, const VorticityDensity &omega,
                              const HelixParams &p);

/// Helical images of a cross-section grid: an n x n grid over the square of
/// half-width `half_width` around each centre, lifted to `layers` heights
/// evenly spaced over one pitch period [0, 2 pi h).
std::vector<Point3> helical_samples(std::span<const Point2> centers, double half_width, int n, int layers,
                                    const HelixParams &p);

struct LiftCheck {
    /// max |curl U x xi| / (|curl U| |xi|).
    double parallel_defect = 0.0;
    /// max |curl U(S_theta x) - R_theta curl U(x)| / max |curl U|.
    double symmetry_defect = 0.0;
    /// max |div curl U| by central differences with the given step.
    double divergence = 0.0;
    /// Scale of the first derivatives entering the divergence, max |d_i (curl U)_i|.
    double derivative_scale = 0.0;
    double step = 0.0;
};

/// Runs the three checks at the given samples.
LiftCheck check_lift(std::span<const Point3> samples, const VorticityDensity &omega, const HelixParams &p,
                     double step);

/// Point cloud rows x1,x2,x3,omega_xi,w1,w2,w3 where omega_xi = |curl U|
/// signed like omega.
void write_point_cloud(const std::string &path, std::span<const Point3> samples, std::span<const Vec3> field);

/// Predicted filaments: rows blob,t,sigma,x1,x2,x3, one polyline per blob and time.
void write_filaments(const std::string &path, const std::vector<BlobSpec> &specs, const HelixParams &p,
                     std::span<const double> times, std::span<const double> sigma);

}  // namespace reconstruct
}  // namespace helivort
