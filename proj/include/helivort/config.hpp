/// @file config.hpp
/// @brief Flat key = value run configuration with one [blob] section per blob.
///
///     # single helical filament
///     h = 1
///     t_final = 1
///     backend = direct
///
///     [blob]
///     center_x = 1
///     center_y = 0
///     radius = 0.01
///     gamma = 1
///     particles = 2000
///
/// Top-level keys: h, r_u, eps, dt, t_final, backend, grid_n, delta, eta0,
/// cadence, seed, jitter, snapshot_every. Blob keys: center_x, center_y,
/// radius, gamma, particles. Text after '#' is a comment. A zero or absent
/// optional value means "use the default". Blobs without a radius take the
/// top-level eps.

#pragma once

#include <istream>
#include <string>

#include "helivort/sim.hpp"

namespace helivort {

struct RunConfig {
    SimConfig sim;
    /// Particle snapshots every this many diagnostics records; 0 keeps only
    /// the first and the last.
    int snapshot_every = 0;
};

/// ConfigError with `origin:line` for unknown keys, duplicates, malformed
/// numbers, keys outside a section they belong to, or blobs missing a centre.
RunConfig parse_config(std::istream &in, const std::string &origin);

/// ConfigError naming the path if it cannot be read.
RunConfig load_config(const std::string &path);

/// Text that parse_config turns back into the same values.
std::string format_config(const RunConfig &cfg);

/// Sets every blob radius and the rescaling eps to the given value.
void override_eps(SimConfig &cfg, double eps);

}  // namespace helivort
