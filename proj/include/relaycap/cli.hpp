// Command-line front end. `run_cli` is the whole program minus process
// plumbing so it can be driven from tests.
//
//   relaycap solve        one instance; report on stdout, JSON solution file
//   relaycap sweep        relay-budget sweep as CSV
//   relaycap figure NAME  data behind fig5 .. fig8
//   relaycap oracle-check solver against the brute-force grid oracle
//
// Exit codes: 0 success, 1 oracle mismatch, 2 bad input, 3 numerical failure.
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "relaycap/core_types.hpp"

namespace relaycap {

inline constexpr int kExitOk = 0;
inline constexpr int kExitMismatch = 1;
inline constexpr int kExitInput = 2;
inline constexpr int kExitNumerical = 3;

/// Seed used by `figure` unless --seed is given.
inline constexpr std::uint64_t kFigureSeed = 20080101;

/// `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Parses `CLASS:sigma_r_sq:sigma_sq:rho_r` with CLASS in {A, Ac}. Throws
/// ParseError on malformed text or a class that contradicts the variances.
SubchannelSpec parse_subchannel(const std::string& text);

/// Axis `lo:hi:step` in dB, step > 0. Throws ParseError when the range is
/// malformed or empty.
std::vector<double> parse_db_range(const std::string& text);

/// Water-filled ergodic capacity of the source-destination link alone, bits.
double direct_link_rate(const StateEnsemble& ensemble, double p_budget);

}  // namespace relaycap
