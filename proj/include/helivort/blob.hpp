/// @file blob.hpp
/// @brief Concentrated vorticity patches and their leading-order motion.
///
/// A blob of circulation gamma centred at z0 with radius eps is predicted to
/// rotate rigidly about the origin, z(t) = R(nu t) z0 in rescaled time, with
///
///     nu = -gamma / (4 pi h sqrt(|z0|^2 + h^2)).

#pragma once

#include <vector>

#include "helivort/geometry.hpp"

namespace helivort {

struct BlobSpec {
    Point2 center;
    double radius = 0.0;
    double circulation = 0.0;
    int particles = 2000;
};

/// Predicted angular frequency nu of a blob centred at z0.
double angular_frequency(const BlobSpec &spec, const HelixParams &p);

/// Predicted centre R(nu t) z0.
Point2 leading_order(const BlobSpec &spec, const HelixParams &p, double t);

/// Sampled filament sigma -> (R(sigma) z(t), h sigma) through the predicted centre.
std::vector<Point3> helix_curve(const BlobSpec &spec, const HelixParams &p, double t,
                                const std::vector<double> &sigma);

}  // namespace helivort
