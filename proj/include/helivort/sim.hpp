/// @file sim.hpp
/// @brief Blob initialization, RK4 advection in rescaled time and the run loop.

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "helivort/blob.hpp"
#include "helivort/diagnostics.hpp"
#include "helivort/flow.hpp"
#include "helivort/particles.hpp"

namespace helivort {

/// Zero in the optional numeric fields means "use the default".
struct SimConfig {
    double h = 1.0;
    double r_u = 0.0;
    std::vector<BlobSpec> blobs;
    double eps = 0.0;
    double dt = 0.0;
    double t_final = 1.0;
    Backend backend = Backend::direct;
    int grid_n = 129;
    double delta = 0.0;
    double eta0 = 0.0;
    int cadence = 10;
    std::uint64_t seed = 0;
    /// Random displacement of each particle, as a fraction of delta.
    double jitter = 0.0;
};

namespace sim {

/// Fills r_u, eps, delta and eta0 and validates the blob layout. dt stays
/// as given (it needs a velocity evaluation, see default_dt).
///   r_u   = 2 max(1, max_i |z_i| + eps_i)
///   eps   = largest blob radius
///   delta = min_i 2 eps_i sqrt(pi / P_i), the mean particle spacing
///   eta0  = support_half_width(blobs, r_u)
/// Throws ConfigError for equal centre radii, supports closer than 2 eta0,
/// blobs reaching the boundary or invalid scalars.
SimConfig resolve(SimConfig cfg);

/// Antipodal sunflower layout inside each blob disk, equal weights gamma/P.
/// Requires a resolved config.
ParticleSystem init_blobs(const SimConfig &cfg);

/// Largest rescaled particle speed.
double max_speed(std::span<const Vec2> rescaled_velocity);

/// Half of the stability limit 0.5 delta / max speed at the initial state.
double default_dt(const ParticleSystem &sys, const VelocityField &field);

/// One classical RK4 step of length dt in rescaled time. Throws StabilityError
/// when |dt| > 0.5 delta / max speed at the start of the step, EscapeError when
/// a particle leaves the disk.
ParticleSystem step_rk4(const ParticleSystem &sys, double dt, const VelocityField &field);

struct Plan {
    /// Resolved config with dt set to the step actually taken.
    SimConfig config;
    double dt = 0.0;
    long steps = 0;
};

/// Resolves the config and picks the step: the requested dt (or default_dt
/// at the initial state) shrunk so that a whole number of steps reaches t_final.
Plan plan(const SimConfig &config);

struct RunResult {
    std::vector<DiagnosticsRecord> records;
    ParticleSystem final_state;
    SimConfig config;
    double dt = 0.0;
    long steps = 0;
    /// First time at which a particle left its monitored annulus.
    std::optional<double> first_violation;
};

/// Called after every recorded snapshot.
using Observer = std::function<void(const ParticleSystem &, const DiagnosticsRecord &)>;

/// Advances to t_final, recording diagnostics at t = 0, every `cadence` steps
/// and at the final time. The support condition is checked after every step.
RunResult run(const SimConfig &config, const Observer &observer = {});

}  // namespace sim
}  // namespace helivort
