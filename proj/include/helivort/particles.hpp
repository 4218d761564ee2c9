/// @file particles.hpp
/// @brief Vortex-blob particle representation of the scalar vorticity.

#pragma once

#include <cstddef>
#include <vector>

#include "helivort/geometry.hpp"

namespace helivort {

/// The cross-section domain, fixed to the disk B(0, radius).
class DiskDomain {
public:
    explicit DiskDomain(double radius);

    double radius() const { return radius_; }
    bool contains(const Point2 &x) const { return norm2(x) < radius_ * radius_; }

private:
    double radius_;
};

/// Regularized vortex blobs. Weights are circulations and never change
/// after initialization; `eps` is the concentration scale entering the
/// 1/|ln eps| time rescaling and `delta` the kernel regularization length.
struct ParticleSystem {
    ParticleSystem(HelixParams params, DiskDomain domain, double eps, double delta);

    std::vector<Point2> positions;
    std::vector<double> weights;
    std::vector<int> blob_id;

    HelixParams params;
    DiskDomain domain;
    double eps;
    double delta;

    std::size_t size() const { return positions.size(); }

    /// Number of blobs, i.e. 1 + the largest blob id (0 when empty).
    int blob_count() const;

    /// Sum of the weights carrying the given blob id.
    double circulation(int blob) const;

    void add(const Point2 &position, double weight, int blob);

    /// Throws ConfigError on inconsistent array lengths, non-finite data,
    /// negative blob ids or particles outside the disk.
    void validate() const;
};

}  // namespace helivort
