// Building state ensembles: seeded Rayleigh Monte Carlo, CSV files, and the
// expectation operator every fading solver sums with.
#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string_view>

#include "relaycap/core_types.hpp"

namespace relaycap {

/// n equally weighted states with g_i = rho_i |h_i|^2, |h_i|^2 ~ Exp(1).
///
/// Generator (pinned): std::mt19937_64 seeded with `seed`; each state draws
/// three 64-bit words in the order h1, h2, h3, maps each to
/// u = ((x >> 11) + 0.5) * 2^-53 in (0,1) and takes -ln u.
StateEnsemble generate_rayleigh_ensemble(std::size_t n, std::uint64_t seed, double rho1,
                                         double rho2, double rho3);

/// CSV with header exactly `weight,g1,g2,g3`. Weights summing to within
/// [0.999, 1.001] are renormalized; anything else is rejected.
StateEnsemble load_ensemble(const std::filesystem::path& path);
StateEnsemble parse_ensemble(std::istream& in, std::string_view source_name = "<stream>");

void write_ensemble(std::ostream& out, const StateEnsemble& ensemble);

/// sum_k w_k f(state_k) with compensated summation in state order.
double expectation(const StateEnsemble& ensemble,
                   const std::function<double(const FadingState&)>& f);

}  // namespace relaycap
