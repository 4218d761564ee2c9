#include "helivort/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "helivort/error.hpp"
#include "helivort/kernel.hpp"

namespace helivort {

double angular_frequency(const BlobSpec &spec, const HelixParams &p) {
    return -spec.circulation / (4.0 * std::numbers::pi * p.h() * kernel::lifted_norm(spec.center, p));
}

Point2 leading_order(const BlobSpec &spec, const HelixParams &p, double t) {
    return rotate(spec.center, angular_frequency(spec, p) * t);
}

std::vector<Point3> helix_curve(const BlobSpec &spec, const HelixParams &p, double t,
                                const std::vector<double> &sigma) {
    const Point2 z = leading_order(spec, p, t);
    std::vector<Point3> curve;
    curve.reserve(sigma.size());
    for (double s : sigma) {
        const Point2 r = rotate(z, s);
        curve.push_back({r.x, r.y, p.h() * s});
    }
    return curve;
}

namespace sim {

namespace {

std::string describe(const BlobSpec &b, std::size_t i) {
    std::ostringstream os;
    os << "blob " << i << " (centre " << b.center.x << "," << b.center.y << ", radius " << b.radius << ")";
    return os.str();
}

// Golden-angle spiral on m radii r_k = eps sqrt((k + 1/2)/m), each point paired
// with its antipode, so the centre of vorticity is exact and the mean squared
// distance to the centre is exactly eps^2/2. Odd counts add a centre particle.
void sunflower(const BlobSpec &b, int blob, ParticleSystem &sys) {
    const int pairs = b.particles / 2;
    const double w = b.circulation / b.particles;
    if (b.particles % 2 == 1) sys.add(b.center, w, blob);
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int k = 0; k < pairs; ++k) {
        const double r = b.radius * std::sqrt((k + 0.5) / pairs);
        const Vec2 d{r * std::cos(k * golden), r * std::sin(k * golden)};
        sys.add(b.center + d, w, blob);
        sys.add(b.center - d, w, blob);
    }
}

}  // namespace

SimConfig resolve(SimConfig cfg) {
    if (!(cfg.h > 0.0) || !std::isfinite(cfg.h)) throw ConfigError("h must be finite and > 0");
    if (cfg.blobs.empty()) throw ConfigError("at least one blob is required");
    if (!(cfg.t_final >= 0.0) || !std::isfinite(cfg.t_final)) throw ConfigError("t_final must be >= 0");
    if (!(cfg.dt >= 0.0) || !std::isfinite(cfg.dt)) throw ConfigError("dt must be >= 0 (0 selects the default)");
    if (cfg.cadence < 1) throw ConfigError("cadence must be >= 1");
    if (cfg.backend == Backend::grid && cfg.grid_n < 9) throw ConfigError("grid_n must be >= 9");
    if (!(cfg.jitter >= 0.0)) throw ConfigError("jitter must be >= 0");

    double reach = 0.0;
    double largest = 0.0;
    for (std::size_t i = 0; i < cfg.blobs.size(); ++i) {
        const BlobSpec &b = cfg.blobs[i];
        if (!(b.radius > 0.0) || !std::isfinite(b.radius)) throw ConfigError(describe(b, i) + ": eps must be > 0");
        if (b.circulation == 0.0 || !std::isfinite(b.circulation)) {
            throw ConfigError(describe(b, i) + ": gamma must be finite and nonzero");
        }
        if (b.particles < 1) throw ConfigError(describe(b, i) + ": particles must be >= 1");
        reach = std::max(reach, norm(b.center) + b.radius);
        largest = std::max(largest, b.radius);
    }
    if (cfg.r_u == 0.0) cfg.r_u = 2.0 * std::max(1.0, reach);
    if (!(cfg.r_u > 0.0) || !std::isfinite(cfg.r_u)) throw ConfigError("r_u must be > 0");
    if (cfg.eps == 0.0) cfg.eps = largest;
    if (!(cfg.eps > 0.0 && cfg.eps < 1.0)) throw ConfigError("eps must lie in (0, 1)");

    for (std::size_t i = 0; i < cfg.blobs.size(); ++i) {
        const BlobSpec &b = cfg.blobs[i];
        if (!(norm(b.center) + b.radius < cfg.r_u)) {
            throw ConfigError(describe(b, i) + " does not fit inside the disk of radius " + std::to_string(cfg.r_u));
        }
        for (std::size_t j = 0; j < i; ++j) {
            if (norm(b.center) == norm(cfg.blobs[j].center)) {
                throw ConfigError(describe(b, i) + " and blob " + std::to_string(j) +
                                  " have equal centre radii; distinct radii are required");
            }
        }
    }

    if (cfg.eta0 == 0.0) cfg.eta0 = diagnostics::support_half_width(cfg.blobs, cfg.r_u);
    if (!(cfg.eta0 > 0.0)) throw ConfigError("eta0 must be > 0");
    for (std::size_t i = 0; i < cfg.blobs.size(); ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            const BlobSpec &a = cfg.blobs[i];
            const BlobSpec &b = cfg.blobs[j];
            const double gap = norm(a.center - b.center) - a.radius - b.radius;
            if (gap < 2.0 * cfg.eta0) {
                throw ConfigError(describe(a, i) + " and blob " + std::to_string(j) +
                                  " overlap: support distance " + std::to_string(gap) + " < 2 eta0 = " +
                                  std::to_string(2.0 * cfg.eta0));
            }
        }
    }

    if (cfg.delta == 0.0) {
        cfg.delta = std::numeric_limits<double>::infinity();
        for (const BlobSpec &b : cfg.blobs) {
            cfg.delta = std::min(cfg.delta, 2.0 * b.radius * std::sqrt(std::numbers::pi / b.particles));
        }
    }
    if (!(cfg.delta > 0.0) || !std::isfinite(cfg.delta)) throw ConfigError("delta must be > 0");
    return cfg;
}

ParticleSystem init_blobs(const SimConfig &cfg) {
    ParticleSystem sys(HelixParams{cfg.h}, DiskDomain{cfg.r_u}, cfg.eps, cfg.delta);
    for (std::size_t i = 0; i < cfg.blobs.size(); ++i) sunflower(cfg.blobs[i], static_cast<int>(i), sys);
    if (cfg.jitter > 0.0) {
        std::mt19937_64 rng(cfg.seed);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        for (std::size_t k = 0; k < sys.size(); ++k) {
            const BlobSpec &b = cfg.blobs[sys.blob_id[k]];
            const double r = cfg.jitter * cfg.delta * std::sqrt(unit(rng));
            const double a = 2.0 * std::numbers::pi * unit(rng);
            const Point2 moved = sys.positions[k] + Vec2{r * std::cos(a), r * std::sin(a)};
            if (norm(moved - b.center) < b.radius) sys.positions[k] = moved;
        }
    }
    sys.validate();
    return sys;
}

double max_speed(std::span<const Vec2> v) {
    double m = 0.0;
    for (const Vec2 &u : v) m = std::max(m, norm(u));
    return m;
}

double default_dt(const ParticleSystem &sys, const VelocityField &field) {
    const auto v = flow::rescaled_velocity(field.at_particles(sys), sys.eps);
    const double speed = max_speed(v);
    if (speed == 0.0) return 0.1;
    return 0.25 * sys.delta / speed;
}

ParticleSystem step_rk4(const ParticleSystem &sys, double dt, const VelocityField &field) {
    const double c = flow::time_rescale(sys.eps);
    const std::size_t n = sys.size();

    const auto stage = [&](const ParticleSystem &s) {
        for (std::size_t k = 0; k < n; ++k) {
            if (!s.domain.contains(s.positions[k])) {
                std::ostringstream os;
                os << "particle " << k << " left the disk at (" << s.positions[k].x << ", " << s.positions[k].y << ")";
                throw EscapeError(os.str());
            }
        }
        auto v = field.at_particles(s);
        for (Vec2 &u : v) u *= c;
        return v;
    };

    const auto k1 = stage(sys);
    const double speed = max_speed(k1);
    if (std::abs(dt) * speed > 0.5 * sys.delta) {
        const double limit = 0.5 * sys.delta / speed;
        std::ostringstream os;
        os << "time step " << std::abs(dt) << " exceeds the stability limit 0.5 delta / max speed = " << limit;
        throw StabilityError(os.str(), 0.9 * limit);
    }

    ParticleSystem tmp = sys;
    const auto advance = [&](const std::vector<Vec2> &k, double a) {
        for (std::size_t i = 0; i < n; ++i) tmp.positions[i] = sys.positions[i] + (a * dt) * k[i];
    };
    advance(k1, 0.5);
    const auto k2 = stage(tmp);
    advance(k2, 0.5);
    const auto k3 = stage(tmp);
    advance(k3, 1.0);
    const auto k4 = stage(tmp);

    ParticleSystem out = sys;
    for (std::size_t i = 0; i < n; ++i) {
        out.positions[i] += (dt / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    for (std::size_t k = 0; k < n; ++k) {
        if (!out.domain.contains(out.positions[k])) {
            throw EscapeError("particle " + std::to_string(k) + " left the disk");
        }
    }
    return out;
}

Plan plan(const SimConfig &config) {
    Plan out{.config = resolve(config), .dt = 0.0, .steps = 0};
    if (out.config.t_final > 0.0) {
        double requested = out.config.dt;
        if (!(requested > 0.0)) {
            const ParticleSystem sys = init_blobs(out.config);
            requested = default_dt(sys, VelocityField(out.config.backend, sys, out.config.grid_n));
        }
        out.steps = std::max(1L, static_cast<long>(std::ceil(out.config.t_final / requested - 1e-9)));
        out.dt = out.config.t_final / out.steps;
    }
    out.config.dt = out.dt;
    return out;
}

RunResult run(const SimConfig &config, const Observer &observer) {
    const Plan pl = plan(config);
    const SimConfig &cfg = pl.config;
    ParticleSystem sys = init_blobs(cfg);
    const VelocityField field(cfg.backend, sys, cfg.grid_n);
    const long steps = pl.steps;
    const double dt = pl.dt;
    RunResult result{.records = {}, .final_state = sys, .config = cfg, .dt = dt, .steps = steps,
                     .first_violation = std::nullopt};

    std::vector<Annulus> annuli;
    for (const BlobSpec &b : cfg.blobs) annuli.push_back({norm(b.center), cfg.eta0});
    const auto inside = [&](const ParticleSystem &s) {
        for (std::size_t k = 0; k < s.size(); ++k) {
            if (!annuli[s.blob_id[k]].contains(s.positions[k])) return false;
        }
        return true;
    };

    const auto emit = [&](double t) {
        DiagnosticsRecord r = diagnostics::record(sys, t, cfg.blobs, cfg.eta0);
        r.support_ok = r.support_ok && !result.first_violation.has_value();
        result.records.push_back(r);
        if (observer) observer(sys, r);
    };

    if (!inside(sys)) result.first_violation = 0.0;
    emit(0.0);
    for (long s = 1; s <= steps; ++s) {
        sys = step_rk4(sys, dt, field);
        const double t = s == steps ? cfg.t_final : s * dt;
        if (!result.first_violation && !inside(sys)) result.first_violation = t;
        if (s % cfg.cadence == 0 || s == steps) emit(t);
    }
    result.final_state = sys;
    return result;
}

}  // namespace sim
}  // namespace helivort
