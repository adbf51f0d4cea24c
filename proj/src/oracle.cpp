#include "relaycap/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <fmt/format.h>

namespace relaycap {

namespace {

constexpr double kLn2 = std::numbers::ln2;
constexpr std::uint64_t kMaxEvaluations = 2'000'000'000ULL;

int grid_steps(double resolution) {
  if (!(resolution > 0.0) || resolution > 0.1) {
    throw DomainError(fmt::format("oracle resolution must be in (0, 0.1], got {}", resolution));
  }
  return static_cast<int>(std::ceil(1.0 / resolution - 1e-9));
}

// Compositions of n into k parts, lexicographic in the leading parts.
std::vector<std::vector<int>> compositions(int k, int n) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(k, 0);
  auto rec = [&](auto&& self, int i, int left) -> void {
    if (i == k - 1) {
      cur[i] = left;
      out.push_back(cur);
      return;
    }
    for (int v = 0; v <= left; ++v) {
      cur[i] = v;
      self(self, i + 1, left - v);
    }
  };
  rec(rec, 0, n);
  return out;
}

void guard(std::uint64_t evaluations) {
  if (evaluations > kMaxEvaluations) {
    throw DomainError(fmt::format("oracle grid has {} points (limit {}); use a coarser resolution",
                                  evaluations, kMaxEvaluations));
  }
}

// |f(t + d) - f(t)| for f(t) = t log2(1 + x/t) is at most f(d).
double theta_modulus(double x, double d) { return time_shared_rate(x, d); }

}  // namespace

std::string_view to_string(FadingModel m) {
  switch (m) {
    case FadingModel::kFullDuplexLower:
      return "full-duplex-lower";
    case FadingModel::kFullDuplexUpper:
      return "full-duplex-upper";
    case FadingModel::kScenarioI:
      return "scenarioI";
    case FadingModel::kScenarioII:
      return "scenarioII";
    case FadingModel::kScenarioIII:
      return "scenarioIII";
    case FadingModel::kScenarioIIUpper:
      return "scenarioII-upper";
    case FadingModel::kScenarioIIIUpper:
      return "scenarioIII-upper";
  }
  return "?";
}

OracleResult grid_maxmin_parallel(const ParallelProblem& problem, double resolution) {
  problem.validate();
  const int k = static_cast<int>(problem.subchannels.size());
  if (k > 3) throw DomainError(fmt::format("grid_maxmin_parallel: K = {} exceeds 3", k));
  const int n = grid_steps(resolution);
  const auto comps = compositions(k, n);
  const std::uint64_t count = static_cast<std::uint64_t>(comps.size()) * comps.size();
  guard(count);

  const double P = problem.p_budget, Q = problem.pr_budget;
  std::vector<double> r2(comps.size());
  for (std::size_t i = 0; i < comps.size(); ++i) {
    double sum = 0.0;
    for (int j = 0; j < k; ++j) {
      const SubchannelSpec& s = problem.subchannels[j];
      const double noise = s.in_a() ? s.sigma_r_sq() : s.sigma_sq();
      sum += cap_real(P * comps[i][j] / n / noise);
    }
    r2[i] = sum;
  }

  OracleResult best;
  best.value = -std::numeric_limits<double>::infinity();
  std::size_t bi = 0, bj = 0;
  for (std::size_t i = 0; i < comps.size(); ++i) {
    for (std::size_t q = 0; q < comps.size(); ++q) {
      double r1 = 0.0;
      for (int j = 0; j < k; ++j) {
        const SubchannelSpec& s = problem.subchannels[j];
        const double p = P * comps[i][j] / n;
        const double pr = Q * comps[q][j] / n;
        r1 += cap_real((p + s.rho_r() * pr) / s.sigma_sq());
      }
      const double v = std::min(r1, r2[i]);
      if (v > best.value) {
        best.value = v;
        bi = i;
        bj = q;
      }
    }
  }
  best.evaluations = count;
  for (int j = 0; j < k; ++j) {
    best.allocation.p.push_back(P * comps[bi][j] / n);
    best.allocation.p_r.push_back(Q * comps[bj][j] / n);
  }

  double g1 = 0.0, g2 = 0.0, h = 0.0;
  for (const SubchannelSpec& s : problem.subchannels) {
    g1 = std::max(g1, 1.0 / s.sigma_sq());
    g2 = std::max(g2, s.rho_r() / s.sigma_sq());
    h = std::max(h, 1.0 / (s.in_a() ? s.sigma_r_sq() : s.sigma_sq()));
  }
  const double move = 2.0 * (k - 1) / n;
  const double gap1 = (g1 * P + g2 * Q) * move / (2.0 * kLn2);
  const double gap2 = h * P * move / (2.0 * kLn2);
  best.gap = std::max(gap1, gap2);
  return best;
}

OracleResult grid_maxmin_fading(const StateEnsemble& ensemble, double p_budget, double pr_budget,
                                FadingModel model, double resolution, double theta_resolution) {
  const int k = static_cast<int>(ensemble.size());
  const bool per_state_theta =
      model == FadingModel::kScenarioIII || model == FadingModel::kScenarioIIIUpper;
  const bool shared_theta =
      model == FadingModel::kScenarioII || model == FadingModel::kScenarioIIUpper;
  const bool full_duplex =
      model == FadingModel::kFullDuplexLower || model == FadingModel::kFullDuplexUpper;
  const bool upper = model == FadingModel::kFullDuplexUpper ||
                     model == FadingModel::kScenarioIIUpper ||
                     model == FadingModel::kScenarioIIIUpper;
  if (k > 3) throw DomainError(fmt::format("grid_maxmin_fading: {} states exceed 3", k));
  if (per_state_theta && k > 2) {
    throw DomainError(fmt::format("grid_maxmin_fading: Scenario III grid allows 2 states, got {}", k));
  }
  if (!(p_budget >= 0.0) || !(pr_budget >= 0.0)) {
    throw DomainError("grid_maxmin_fading: budgets must be >= 0");
  }
  const int n = grid_steps(resolution);
  const int m = (shared_theta || per_state_theta)
                    ? grid_steps(theta_resolution > 0.0 ? theta_resolution : resolution)
                    : 1;
  const auto comps = compositions(k, n);

  std::vector<std::vector<double>> thetas;
  if (full_duplex) {
    thetas.push_back({});
  } else if (model == FadingModel::kScenarioI) {
    thetas.push_back(std::vector<double>(k, 0.5));
  } else if (shared_theta) {
    for (int i = 0; i <= m; ++i) thetas.push_back(std::vector<double>(k, static_cast<double>(i) / m));
  } else {
    std::vector<int> idx(k, 0);
    while (true) {
      std::vector<double> t(k);
      for (int j = 0; j < k; ++j) t[j] = static_cast<double>(idx[j]) / m;
      thetas.push_back(t);
      int j = k - 1;
      while (j >= 0 && idx[j] == m) idx[j--] = 0;
      if (j < 0) break;
      ++idx[j];
    }
  }
  const std::uint64_t count =
      static_cast<std::uint64_t>(thetas.size()) * comps.size() * comps.size();
  guard(count);

  const auto& st = ensemble.states();
  std::vector<double> h(k);
  for (int j = 0; j < k; ++j) {
    h[j] = upper ? st[j].g1 + st[j].g3 : (st[j].in_a() ? st[j].g3 : st[j].g1);
  }
  auto power = [&](double budget, int part, int j) { return budget * part / n / st[j].weight; };

  OracleResult best;
  best.value = -std::numeric_limits<double>::infinity();
  std::size_t bt = 0, bi = 0, bj = 0;
  std::vector<double> a(comps.size()), d(comps.size()), b(comps.size());
  for (std::size_t t = 0; t < thetas.size(); ++t) {
    if (full_duplex) {
      for (std::size_t i = 0; i < comps.size(); ++i) {
        double r2 = 0.0;
        for (int j = 0; j < k; ++j) {
          r2 += st[j].weight * std::log2(1.0 + power(p_budget, comps[i][j], j) * h[j]);
        }
        d[i] = r2;
      }
      for (std::size_t i = 0; i < comps.size(); ++i) {
        for (std::size_t q = 0; q < comps.size(); ++q) {
          double r1 = 0.0;
          for (int j = 0; j < k; ++j) {
            const double p = power(p_budget, comps[i][j], j);
            const double pr = power(pr_budget, comps[q][j], j);
            r1 += st[j].weight * std::log2(1.0 + p * st[j].g1 + pr * st[j].g2);
          }
          const double v = std::min(r1, d[i]);
          if (v > best.value) {
            best.value = v;
            bt = t;
            bi = i;
            bj = q;
          }
        }
      }
      continue;
    }
    const std::vector<double>& th = thetas[t];
    for (std::size_t i = 0; i < comps.size(); ++i) {
      double src = 0.0, dec = 0.0, rel = 0.0;
      for (int j = 0; j < k; ++j) {
        const double p = power(p_budget, comps[i][j], j);
        const double pr = power(pr_budget, comps[i][j], j);
        src += st[j].weight * time_shared_rate(p * st[j].g1, th[j]);
        dec += st[j].weight * time_shared_rate(p * h[j], th[j]);
        rel += st[j].weight * time_shared_rate(pr * st[j].g2, 1.0 - th[j]);
      }
      a[i] = src;
      d[i] = dec;
      b[i] = rel;
    }
    for (std::size_t i = 0; i < comps.size(); ++i) {
      for (std::size_t q = 0; q < comps.size(); ++q) {
        const double v = std::min(a[i] + b[q], d[i]);
        if (v > best.value) {
          best.value = v;
          bt = t;
          bi = i;
          bj = q;
        }
      }
    }
  }
  best.evaluations = count;
  for (int j = 0; j < k; ++j) {
    best.allocation.p.push_back(power(p_budget, comps[bi][j], j));
    best.allocation.p_r.push_back(power(pr_budget, comps[bj][j], j));
  }
  if (!full_duplex) best.allocation.theta = thetas[bt];

  // Power moves to the grid at fixed theta, then theta moves to its grid.
  double g1 = 0.0, g2 = 0.0, hm = 0.0;
  for (int j = 0; j < k; ++j) {
    g1 = std::max(g1, st[j].g1);
    g2 = std::max(g2, st[j].g2);
    hm = std::max(hm, h[j]);
  }
  const double move = 2.0 * (k - 1) / n;
  double gap1 = (g1 * p_budget + g2 * pr_budget) * move / kLn2;
  double gap2 = hm * p_budget * move / kLn2;
  if (shared_theta || per_state_theta) {
    const double dt = 1.0 / m;
    for (int j = 0; j < k; ++j) {
      const double w = st[j].weight;
      gap1 += w * (theta_modulus(st[j].g1 * p_budget / w, dt) +
                   theta_modulus(st[j].g2 * pr_budget / w, dt));
      gap2 += w * theta_modulus(h[j] * p_budget / w, dt);
    }
  }
  best.gap = std::max(gap1, gap2);
  return best;
}

OracleResult grid_sync_parallel(const ParallelProblem& problem, double resolution) {
  problem.validate();
  const int k = static_cast<int>(problem.subchannels.size());
  if (k > 2) throw DomainError(fmt::format("grid_sync_parallel: K = {} exceeds 2", k));
  const int n = grid_steps(resolution);
  const auto comps = compositions(k, n);
  std::vector<std::vector<double>> betas;
  {
    std::vector<int> idx(k, 0);
    while (true) {
      std::vector<double> b(k);
      for (int j = 0; j < k; ++j) b[j] = static_cast<double>(idx[j]) / n;
      betas.push_back(b);
      int j = k - 1;
      while (j >= 0 && idx[j] == n) idx[j--] = 0;
      if (j < 0) break;
      ++idx[j];
    }
  }
  const std::uint64_t count =
      static_cast<std::uint64_t>(comps.size()) * comps.size() * betas.size();
  guard(count);

  const double P = problem.p_budget, Q = problem.pr_budget;
  OracleResult best;
  best.value = -std::numeric_limits<double>::infinity();
  std::size_t bi = 0, bq = 0, bb = 0;
  for (std::size_t i = 0; i < comps.size(); ++i) {
    for (std::size_t q = 0; q < comps.size(); ++q) {
      for (std::size_t bi_ = 0; bi_ < betas.size(); ++bi_) {
        double r1 = 0.0, r2 = 0.0;
        for (int j = 0; j < k; ++j) {
          const SubchannelSpec& s = problem.subchannels[j];
          const double p = P * comps[i][j] / n;
          const double pr = Q * comps[q][j] / n;
          const double beta = betas[bi_][j];
          r1 += cap_real((p + s.rho_r() * pr + 2.0 * std::sqrt((1.0 - beta) * s.rho_r() * p * pr)) /
                         s.sigma_sq());
          r2 += cap_real(beta * p / (s.in_a() ? s.sigma_r_sq() : s.sigma_sq()));
        }
        const double v = std::min(r1, r2);
        if (v > best.value) {
          best.value = v;
          bi = i;
          bq = q;
          bb = bi_;
        }
      }
    }
  }
  best.evaluations = count;
  for (int j = 0; j < k; ++j) {
    best.allocation.p.push_back(P * comps[bi][j] / n);
    best.allocation.p_r.push_back(Q * comps[bq][j] / n);
  }
  best.beta = betas[bb];

  // Moduli of the coherent term in p, p_r and beta-bar, then the C() slope.
  const double dp = (k - 1) * P / n, dq = (k - 1) * Q / n, db = 1.0 / n;
  double gap1 = 0.0, gap2 = 0.0;
  for (const SubchannelSpec& s : problem.subchannels) {
    const double rho = s.rho_r();
    const double dx = 2.0 * dp + rho * 2.0 * dq +
                      2.0 * (std::sqrt(rho * Q * 2.0 * dp) + std::sqrt(rho * P * 2.0 * dq) +
                             std::sqrt(rho * P * Q * db));
    gap1 += dx / (2.0 * kLn2 * s.sigma_sq());
    const double noise = s.in_a() ? s.sigma_r_sq() : s.sigma_sq();
    gap2 += (2.0 * dp + P * db) / (2.0 * kLn2 * noise);
  }
  best.gap = std::max(gap1, gap2);
  return best;
}

}  // namespace relaycap
