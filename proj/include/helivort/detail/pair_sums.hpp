/// @file pair_sums.hpp
/// @brief O(N M) summation core shared by velocity, local energy and energy.
///
/// Works in the flattened coordinates T(y). With s_j = w_j sqrt(|Y_j|) and
/// q = |T x - T y_j|^2 + delta^2 it accumulates, per target,
///
///     log_sum   = sum_j s_j * ln(q) / 2
///     flat_sum  = sum_j s_j * (T x - T y_j) / q
///
/// which the callers turn into psi, v_L and v_K by multiplying with the
/// per-target factors sqrt(|X|)/(2 pi h), x^perp/(2|X|^2) and DT(x).

#pragma once

#include <span>
#include <vector>

#include "helivort/particles.hpp"

namespace helivort::detail {

struct SourceArrays {
    std::vector<double> tx;
    std::vector<double> ty;
    std::vector<double> strength;  ///< w_j sqrt(|Y_j|)

    std::size_t size() const { return tx.size(); }
};

struct TargetSums {
    std::vector<double> log_sum;
    std::vector<double> flat_x;
    std::vector<double> flat_y;

    explicit TargetSums(std::size_t n) : log_sum(n, 0.0), flat_x(n, 0.0), flat_y(n, 0.0) {}
};

/// Flattened positions and strengths of all particles of a system.
SourceArrays flattened_sources(const ParticleSystem &sys);

/// Sums over all sources for arbitrary targets given by their flattened coordinates.
TargetSums pair_sums(std::span<const double> target_tx, std::span<const double> target_ty,
                     const SourceArrays &src, double delta2);

/// Targets are the sources themselves (self pair included, contributing
/// ln(delta^2)/2 to log_sum and nothing to flat_sum). Uses pair symmetry.
TargetSums pair_sums_self(const SourceArrays &src, double delta2);

/// sum_{j<l} s_j s_l ln(|T y_j - T y_l|^2 + delta^2) / 2.
double pair_log_energy(const SourceArrays &src, double delta2);

}  // namespace helivort::detail
