// Random instance generators shared by the unit and acceptance tests.
#pragma once

#include <cmath>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "relaycap/cli.hpp"
#include "relaycap/core_types.hpp"
#include "relaycap/parallel.hpp"

namespace relaycap::testing {

inline double log_uniform(std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
  return std::exp(u(rng));
}

inline ParallelProblem random_parallel(std::mt19937_64& rng, int k) {
  ParallelProblem p;
  for (int i = 0; i < k; ++i) {
    p.subchannels.emplace_back(log_uniform(rng, 0.1, 10.0), log_uniform(rng, 0.1, 10.0),
                               log_uniform(rng, 0.1, 10.0));
  }
  p.p_budget = log_uniform(rng, 0.1, 10.0);
  p.pr_budget = log_uniform(rng, 0.1, 10.0);
  return p;
}

// States with exponential gains around log-uniform means; weights drawn then
// normalized.
inline StateEnsemble random_ensemble(std::mt19937_64& rng, int n) {
  std::exponential_distribution<double> ex(1.0);
  std::uniform_real_distribution<double> u(0.2, 1.0);
  std::vector<FadingState> st;
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    FadingState s;
    s.weight = u(rng);
    s.g1 = log_uniform(rng, 0.1, 10.0) * ex(rng);
    s.g2 = log_uniform(rng, 0.1, 10.0) * ex(rng);
    s.g3 = log_uniform(rng, 0.1, 10.0) * ex(rng);
    total += s.weight;
    st.push_back(s);
  }
  for (FadingState& s : st) s.weight /= total;
  // Absorb the rounding of the normalization into the last weight.
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < st.size(); ++i) sum += st[i].weight;
  st.back().weight = 1.0 - sum;
  return StateEnsemble(std::move(st));
}

struct CliRun {
  int code = 0;
  std::string out;
  std::string err;
};

inline CliRun run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  CliRun r;
  r.code = run_cli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

// CSV text to rows of fields, header first.
inline std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ls(line);
    while (std::getline(ls, field, ',')) fields.push_back(field);
    rows.push_back(std::move(fields));
  }
  return rows;
}

}  // namespace relaycap::testing
