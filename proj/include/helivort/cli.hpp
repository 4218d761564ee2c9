/// @file cli.hpp
/// @brief The `helivort` command line, callable in-process.
///
/// Subcommands: simulate, kernel-check, solver-check, compare-theory,
/// reconstruct3d. Exit codes: 0 success, 1 check failure, 2 usage or
/// configuration error, 3 numerical abort.

#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace helivort {

inline constexpr int exit_ok = 0;
inline constexpr int exit_check_failed = 1;
inline constexpr int exit_usage = 2;
inline constexpr int exit_numerical = 3;

/// args excludes the program name.
int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

}  // namespace helivort
