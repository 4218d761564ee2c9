#include "helivort/reconstruct3d.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>

#include "helivort/error.hpp"
#include "helivort/format.hpp"

namespace helivort::reconstruct {

namespace {

std::ofstream open_output(const std::string &path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path);
    return out;
}

Vec3 rotate3(const Vec3 &v, double theta) {
    const Point2 r = rotate(Point2{v.x, v.y}, theta);
    return {r.x, r.y, v.z};
}

}  // namespace

Vec3 xi_field(const Point3 &x, const HelixParams &p) { return {-x.y, x.x, p.h()}; }

Point3 helical_map(double theta, const Point3 &x, const HelixParams &p) {
    const Vec3 r = rotate3(x, theta);
    return {r.x, r.y, r.z + p.h() * theta};
}

VorticityDensity::VorticityDensity(const ParticleSystem &sys, double bandwidth)
    : positions_(sys.positions), weights_(sys.weights), bandwidth_(bandwidth) {
    if (!(bandwidth > 0.0)) throw DomainError("kernel density bandwidth must be > 0");
}

double VorticityDensity::operator()(const Point2 &x) const {
    const double b2 = bandwidth_ * bandwidth_;
    const double cutoff = 81.0 * b2;
    double acc = 0.0;
    for (std::size_t j = 0; j < positions_.size(); ++j) {
        const double d2 = norm2(x - positions_[j]);
        if (d2 < cutoff) acc += weights_[j] * std::exp(-0.5 * d2 / b2);
    }
    return acc / (2.0 * std::numbers::pi * b2);
}

std::vector<Vec3> vorticity3d(std::span<const Point3> samples, const VorticityDensity &omega,
                              const HelixParams &p) {
    std::vector<Vec3> out(samples.size());
#pragma omp parallel for schedule(static)
    for (std::size_t k = 0; k < samples.size(); ++k) {
        const Point3 &x = samples[k];
        const Point2 back = rotate(Point2{x.x, x.y}, -x.z / p.h());
        out[k] = (omega(back) / p.h()) * xi_field(x, p);
    }
    return out;
}

std::vector<Point3> helical_samples(std::span<const Point2> centers, double half_width, int n, int layers,
                                    const HelixParams &p) {
    if (n < 2 || layers < 1) throw ConfigError("helical sampling needs n >= 2 and at least one layer");
    std::vector<Point3> out;
    out.reserve(centers.size() * static_cast<std::size_t>(n * n * layers));
    const double step = 2.0 * half_width / (n - 1);
    for (int layer = 0; layer < layers; ++layer) {
        const double theta = 2.0 * std::numbers::pi * layer / layers;
        for (const Point2 &c : centers) {
            for (int i = 0; i < n; ++i) {
                for (int j = 0; j < n; ++j) {
                    const Point3 base{c.x - half_width + i * step, c.y - half_width + j * step, 0.0};
                    out.push_back(helical_map(theta, base, p));
                }
            }
        }
    }
    return out;
}

LiftCheck check_lift(std::span<const Point3> samples, const VorticityDensity &omega, const HelixParams &p,
                     double step) {
    LiftCheck c;
    c.step = step;
    const auto field = vorticity3d(samples, omega, p);
    double peak = 0.0;
    for (std::size_t k = 0; k < samples.size(); ++k) {
        const Vec3 xi = xi_field(samples[k], p);
        const double scale = norm(field[k]) * norm(xi);
        if (scale > 0.0) c.parallel_defect = std::max(c.parallel_defect, norm(cross(field[k], xi)) / scale);
        peak = std::max(peak, norm(field[k]));
    }

    for (double theta : {0.7, -1.3, 2.0 * std::numbers::pi / 3.0}) {
        std::vector<Point3> moved(samples.size());
        for (std::size_t k = 0; k < samples.size(); ++k) moved[k] = helical_map(theta, samples[k], p);
        const auto image = vorticity3d(moved, omega, p);
        for (std::size_t k = 0; k < samples.size(); ++k) {
            const double d = norm(image[k] - rotate3(field[k], theta));
            if (peak > 0.0) c.symmetry_defect = std::max(c.symmetry_defect, d / peak);
        }
    }

    const Vec3 axes[3] = {{step, 0.0, 0.0}, {0.0, step, 0.0}, {0.0, 0.0, step}};
    std::vector<Point3> stencil;
    stencil.reserve(6 * samples.size());
    for (const Point3 &x : samples) {
        for (const Vec3 &e : axes) {
            stencil.push_back(x + e);
            stencil.push_back(x - e);
        }
    }
    const auto values = vorticity3d(stencil, omega, p);
    for (std::size_t k = 0; k < samples.size(); ++k) {
        const Vec3 *v = &values[6 * k];
        const double dx = (v[0].x - v[1].x) / (2.0 * step);
        const double dy = (v[2].y - v[3].y) / (2.0 * step);
        const double dz = (v[4].z - v[5].z) / (2.0 * step);
        c.divergence = std::max(c.divergence, std::abs(dx + dy + dz));
        c.derivative_scale = std::max({c.derivative_scale, std::abs(dx), std::abs(dy), std::abs(dz)});
    }
    return c;
}

void write_point_cloud(const std::string &path, std::span<const Point3> samples, std::span<const Vec3> field) {
    if (samples.size() != field.size()) throw ConfigError("point cloud: samples and field differ in length");
    std::ofstream out = open_output(path);
    out << "x1,x2,x3,omega_xi,w1,w2,w3\n";
    for (std::size_t k = 0; k < samples.size(); ++k) {
        const Point3 &x = samples[k];
        const Vec3 &w = field[k];
        // The field is omega/h times xi, and xi has a positive third component.
        const double signed_norm = std::copysign(norm(w), w.z);
        out << shortest(x.x) << ',' << shortest(x.y) << ',' << shortest(x.z) << ',' << shortest(signed_norm) << ','
            << shortest(w.x) << ',' << shortest(w.y) << ',' << shortest(w.z) << '\n';
    }
}

void write_filaments(const std::string &path, const std::vector<BlobSpec> &specs, const HelixParams &p,
                     std::span<const double> times, std::span<const double> sigma) {
    std::ofstream out = open_output(path);
    out << "blob,t,sigma,x1,x2,x3\n";
    const std::vector<double> s(sigma.begin(), sigma.end());
    for (std::size_t i = 0; i < specs.size(); ++i) {
        for (double t : times) {
            const auto curve = helix_curve(specs[i], p, t, s);
            for (std::size_t k = 0; k < curve.size(); ++k) {
                out << i << ',' << shortest(t) << ',' << shortest(s[k]) << ',' << shortest(curve[k].x) << ','
                    << shortest(curve[k].y) << ',' << shortest(curve[k].z) << '\n';
            }
        }
    }
}

}  // namespace helivort::reconstruct
