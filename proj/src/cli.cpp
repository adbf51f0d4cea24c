#include "relaycap/cli.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "relaycap/full_duplex.hpp"
#include "relaycap/half_duplex.hpp"
#include "relaycap/numerics.hpp"
#include "relaycap/oracle.hpp"
#include "relaycap/parallel.hpp"
#include "relaycap/sampling.hpp"

namespace relaycap {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double parse_number(std::string_view text, std::string_view what) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v)) {
    throw ParseError(fmt::format("{}: '{}' is not a finite number", what, text));
  }
  return v;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  while (true) {
    const auto pos = text.find(sep);
    parts.push_back(text.substr(0, pos));
    if (pos == std::string_view::npos) break;
    text.remove_prefix(pos + 1);
  }
  return parts;
}

std::string num(double v) { return fmt::format("{:.10g}", v); }
std::string flag(bool b) { return b ? "true" : "false"; }

// Options shared by solve, sweep and oracle-check.
struct ModelOptions {
  std::string model;
  int scenario = 0;
  std::string bound = "lower";
  std::array<std::string, 8> k;
  std::vector<std::string> subchannels;
  double p_db = kNaN, pr_db = kNaN, p_linear = kNaN, pr_linear = kNaN;
  std::string ensemble_path;
  bool rayleigh = false;
  std::size_t samples = 10000;
  std::uint64_t seed = 20080101;
  double rho1 = 0.1, rho2 = 0.1, rho3 = 1.0;
  SolverConfig cfg;
};

void add_model_options(CLI::App& app, ModelOptions& o, bool need_pr) {
  app.add_option("--model", o.model, "parallel-async | parallel-sync | full-duplex | half-duplex")
      ->required()
      ->check(CLI::IsMember({"parallel-async", "parallel-sync", "full-duplex", "half-duplex"}));
  app.add_option("--scenario", o.scenario, "Half-duplex scenario 1, 2 or 3")
      ->check(CLI::IsMember({1, 2, 3}));
  app.add_option("--bound", o.bound, "lower | upper")->check(CLI::IsMember({"lower", "upper"}));
  for (std::size_t i = 0; i < o.k.size(); ++i) {
    app.add_option(fmt::format("--k{}", i + 1), o.k[i],
                   fmt::format("Subchannel {} as CLASS:sigma_r_sq:sigma_sq:rho_r", i + 1));
  }
  app.add_option("--subchannel", o.subchannels, "Further subchannels, same literal format");
  app.add_option("--p-db", o.p_db, "Source budget, dB");
  app.add_option("--p-linear", o.p_linear, "Source budget, linear (overrides --p-db)");
  if (need_pr) {
    app.add_option("--pr-db", o.pr_db, "Relay budget, dB");
    app.add_option("--pr-linear", o.pr_linear, "Relay budget, linear (overrides --pr-db)");
  }
  app.add_option("--ensemble", o.ensemble_path, "State ensemble CSV (weight,g1,g2,g3)");
  app.add_flag("--rayleigh", o.rayleigh, "Draw a Rayleigh ensemble instead of reading one");
  app.add_option("--samples", o.samples, "Rayleigh sample count")->capture_default_str();
  app.add_option("--seed", o.seed, "Rayleigh seed")->capture_default_str();
  app.add_option("--rho1", o.rho1, "Mean source-destination gain")->capture_default_str();
  app.add_option("--rho2", o.rho2, "Mean relay-destination gain")->capture_default_str();
  app.add_option("--rho3", o.rho3, "Mean source-relay gain")->capture_default_str();
  app.add_option("--tol-rate", o.cfg.tol_rate)->capture_default_str();
  app.add_option("--tol-budget", o.cfg.tol_budget)->capture_default_str();
  app.add_option("--max-outer", o.cfg.max_outer)->capture_default_str();
  app.add_option("--max-inner", o.cfg.max_inner)->capture_default_str();
}

double budget(double db, double linear, std::string_view name) {
  if (!std::isnan(linear)) {
    if (!(linear >= 0.0) || !std::isfinite(linear)) {
      throw ParseError(fmt::format("{} linear budget must be finite and >= 0", name));
    }
    return linear;
  }
  if (std::isnan(db)) throw ParseError(fmt::format("{} budget missing (--{}-db)", name, name));
  return db_to_linear(db);
}

// Everything except the relay budget, built once per command.
struct Instance {
  ModelOptions opts;
  std::vector<SubchannelSpec> subchannels;
  std::optional<StateEnsemble> ensemble;
  double p = 0.0;

  bool parallel() const { return opts.model.starts_with("parallel"); }
  HalfDuplexBound hd_bound() const {
    return opts.bound == "upper" ? HalfDuplexBound::kUpper : HalfDuplexBound::kLower;
  }
  Scenario scenario() const {
    return opts.scenario == 1 ? Scenario::kI : opts.scenario == 2 ? Scenario::kII : Scenario::kIII;
  }
  std::string label() const {
    std::string s = opts.model;
    if (opts.model == "half-duplex") s += fmt::format(" scenario {}", to_string(scenario()));
    if (!parallel()) s += fmt::format(" ({} bound)", opts.bound);
    return s;
  }
};

Instance build_instance(const ModelOptions& o) {
  Instance in;
  in.opts = o;
  in.opts.cfg.validate();
  in.p = budget(o.p_db, o.p_linear, "p");
  if (in.parallel()) {
    for (const std::string& s : o.k) {
      if (!s.empty()) in.subchannels.push_back(parse_subchannel(s));
    }
    for (const std::string& s : o.subchannels) in.subchannels.push_back(parse_subchannel(s));
    if (in.subchannels.empty()) throw ParseError("parallel models need at least one --k1 subchannel");
    if (o.bound != "lower") throw ParseError("--bound applies to fading models only");
    return in;
  }
  if (o.model == "half-duplex") {
    if (o.scenario == 0) throw ParseError("half-duplex needs --scenario 1, 2 or 3");
    if (o.scenario == 1 && o.bound == "upper") {
      throw ParseError("Scenario I has no upper-bound solver");
    }
  }
  if (!o.ensemble_path.empty() && o.rayleigh) {
    throw ParseError("give either --ensemble or --rayleigh, not both");
  }
  if (!o.ensemble_path.empty()) {
    in.ensemble.emplace(load_ensemble(o.ensemble_path));
  } else if (o.rayleigh) {
    in.ensemble.emplace(generate_rayleigh_ensemble(o.samples, o.seed, o.rho1, o.rho2, o.rho3));
  } else {
    throw ParseError("fading models need --ensemble FILE or --rayleigh");
  }
  return in;
}

struct Solved {
  MaxMinSolution sol;
  std::vector<double> beta;
};

Solved solve_instance(const Instance& in, double pr) {
  const SolverConfig& cfg = in.opts.cfg;
  Solved out;
  if (in.opts.model == "parallel-async") {
    out.sol = async_optimize(ParallelProblem{in.subchannels, in.p, pr}, cfg);
  } else if (in.opts.model == "parallel-sync") {
    auto s = sync_case1_optimize(ParallelProblem{in.subchannels, in.p, pr}, cfg);
    if (!s) {
      throw ConvergenceError(
          "synchronized instance is outside the R2-binding case; the equalizer regime is "
          "nonconvex (use oracle-check for K <= 2)");
    }
    out.sol = std::move(*s);
    out.beta.assign(in.subchannels.size(), 1.0);
  } else if (in.opts.model == "full-duplex") {
    FullDuplexProblem fp{*in.ensemble, in.p, pr};
    out.sol = in.opts.bound == "upper" ? fd_upper_bound(fp, cfg) : fd_lower_bound(fp, cfg);
  } else {
    out.sol = hd_optimize(HalfDuplexProblem{*in.ensemble, in.p, pr, in.scenario()}, in.hd_bound(),
                          cfg);
  }
  return out;
}

nlohmann::json solution_json(const Instance& in, double pr, const Solved& s) {
  const MaxMinSolution& sol = s.sol;
  nlohmann::json j;
  j["model"] = in.opts.model;
  if (in.opts.model == "half-duplex") j["scenario"] = std::string(to_string(in.scenario()));
  if (!in.parallel()) j["bound"] = in.opts.bound;
  j["p_budget"] = in.p;
  j["pr_budget"] = pr;
  j["case"] = std::string(to_string(sol.case_tag));
  j["case_number"] = case_number(sol.case_tag);
  j["alpha_star"] = sol.alpha_star;
  j["rate_bits"] = sol.rate_bits;
  j["r1_bits"] = sol.r1_bits;
  j["r2_bits"] = sol.r2_bits;
  j["lambda"] = sol.lambda;
  j["mu"] = sol.mu;
  j["capacity_certified"] = sol.capacity_certified;
  j["iterations"] = sol.iterations;
  nlohmann::json rows = nlohmann::json::array();
  const Allocation& a = sol.allocation;
  for (std::size_t k = 0; k < a.p.size(); ++k) {
    nlohmann::json r;
    r["index"] = k;
    if (in.ensemble) {
      const FadingState& st = (*in.ensemble)[k];
      r["weight"] = st.weight;
      r["g1"] = st.g1;
      r["g2"] = st.g2;
      r["g3"] = st.g3;
    } else {
      r["class"] = std::string(to_string(in.subchannels[k].degraded_class()));
    }
    r["p"] = a.p[k];
    r["p_r"] = a.p_r[k];
    if (!a.theta.empty()) r["theta"] = a.theta[k];
    if (!s.beta.empty()) r["beta"] = s.beta[k];
    rows.push_back(std::move(r));
  }
  j["allocation"] = std::move(rows);
  return j;
}

void report(std::ostream& out, const Instance& in, double pr, const Solved& s) {
  const MaxMinSolution& sol = s.sol;
  out << fmt::format("model      {}\n", in.label());
  out << fmt::format("budgets    P = {}  P_R = {}\n", num(in.p), num(pr));
  out << fmt::format("rate       {:.6f} bits\n", sol.rate_bits);
  out << fmt::format("case       {}\n", to_string(sol.case_tag));
  out << fmt::format("alpha*     {}\n", num(sol.alpha_star));
  out << fmt::format("r1, r2     {:.8f}  {:.8f}\n", sol.r1_bits, sol.r2_bits);
  out << fmt::format("lambda, mu {}  {}\n", num(sol.lambda), num(sol.mu));
  out << fmt::format("certified  {}\n", sol.capacity_certified ? "yes" : "no");
  if (in.parallel()) {
    out << "  k  class        p_k      p_r,k\n";
    for (std::size_t k = 0; k < sol.allocation.p.size(); ++k) {
      out << fmt::format("{:>3}  {:<5} {:>10.6f} {:>10.6f}\n", k + 1,
                         to_string(in.subchannels[k].degraded_class()), sol.allocation.p[k],
                         sol.allocation.p_r[k]);
    }
  }
}

// Writes to `path`, or to `out` when path is empty or "-".
void emit(const std::string& path, std::ostream& out, const std::string& text) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path);
  if (!f) throw ParseError(fmt::format("cannot write '{}'", path));
  f << text;
}

int cmd_solve(const ModelOptions& o, const std::string& output, std::ostream& out) {
  const Instance in = build_instance(o);
  const double pr = budget(o.pr_db, o.pr_linear, "pr");
  const Solved s = solve_instance(in, pr);
  report(out, in, pr, s);
  if (output != "-") {
    emit(output, out, solution_json(in, pr, s).dump(2) + "\n");
    out << fmt::format("solution   {}\n", output);
  }
  return kExitOk;
}

int cmd_sweep(const ModelOptions& o, const std::string& range, const std::string& output,
              std::ostream& out) {
  const std::vector<double> axis = parse_db_range(range);
  const Instance in = build_instance(o);
  const bool with_theta = in.opts.model == "half-duplex" && in.scenario() == Scenario::kII;
  std::string csv = "pr_db,rate_bits,case,alpha_star,r1_bits,r2_bits,capacity_certified";
  if (with_theta) csv += ",theta";
  csv += "\n";
  for (double pr_db : axis) {
    const MaxMinSolution sol = solve_instance(in, db_to_linear(pr_db)).sol;
    csv += fmt::format("{},{},{},{},{},{},{}", num(pr_db), num(sol.rate_bits),
                       case_number(sol.case_tag), num(sol.alpha_star), num(sol.r1_bits),
                       num(sol.r2_bits), flag(sol.capacity_certified));
    if (with_theta) csv += "," + num(sol.allocation.theta.at(0));
    csv += "\n";
  }
  emit(output, out, csv);
  return kExitOk;
}

struct FigureOptions {
  std::string name;
  std::size_t samples = 20000;
  std::uint64_t seed = kFigureSeed;
  double p_db = 3.0;
  std::string range;
  std::string output;
  SolverConfig cfg;
};

int cmd_figure(const FigureOptions& f, std::ostream& out) {
  static const std::map<std::string, std::string> kDefaultAxis = {
      {"fig5", "-10:20:0.5"}, {"fig6", "-5:15:0.5"}, {"fig7", "-5:20:0.5"}, {"fig8", "-10:20:1"}};
  const auto it = kDefaultAxis.find(f.name);
  if (it == kDefaultAxis.end()) {
    throw ParseError(fmt::format("unknown figure '{}' (fig5, fig6, fig7, fig8)", f.name));
  }
  const std::vector<double> axis = parse_db_range(f.range.empty() ? it->second : f.range);
  f.cfg.validate();
  const StateEnsemble ensemble = generate_rayleigh_ensemble(f.samples, f.seed, 0.1, 0.1, 1.0);
  const double p = db_to_linear(f.p_db);
  auto solve = [&](Scenario sc, HalfDuplexBound b, double pr_db) {
    return hd_optimize(HalfDuplexProblem{ensemble, p, db_to_linear(pr_db), sc}, b, f.cfg);
  };

  std::string csv;
  if (f.name == "fig5") {
    csv = "pr_db,rate_bits,case,alpha_star,r1_bits,r2_bits,capacity_certified\n";
    for (double x : axis) {
      const MaxMinSolution s = solve(Scenario::kI, HalfDuplexBound::kLower, x);
      csv += fmt::format("{},{},{},{},{},{},{}\n", num(x), num(s.rate_bits),
                         case_number(s.case_tag), num(s.alpha_star), num(s.r1_bits),
                         num(s.r2_bits), flag(s.capacity_certified));
    }
  } else if (f.name == "fig6") {
    csv = "pr_db,lower_bits,upper_bits,certified\n";
    for (double x : axis) {
      const MaxMinSolution lo = solve(Scenario::kII, HalfDuplexBound::kLower, x);
      const MaxMinSolution up = solve(Scenario::kII, HalfDuplexBound::kUpper, x);
      csv += fmt::format("{},{},{},{}\n", num(x), num(lo.rate_bits), num(up.rate_bits),
                         flag(lo.capacity_certified));
    }
  } else if (f.name == "fig7") {
    csv = "pr_db,theta,rate_bits,case\n";
    for (double x : axis) {
      const MaxMinSolution s = solve(Scenario::kII, HalfDuplexBound::kLower, x);
      csv += fmt::format("{},{},{},{}\n", num(x), num(s.allocation.theta.at(0)),
                         num(s.rate_bits), case_number(s.case_tag));
    }
  } else {
    csv = "pr_db,direct_bits,rate_I_bits,rate_II_bits,rate_III_bits\n";
    const double direct = direct_link_rate(ensemble, p);
    for (double x : axis) {
      const double r1 = solve(Scenario::kI, HalfDuplexBound::kLower, x).rate_bits;
      const double r2 = solve(Scenario::kII, HalfDuplexBound::kLower, x).rate_bits;
      const double r3 = solve(Scenario::kIII, HalfDuplexBound::kLower, x).rate_bits;
      csv += fmt::format("{},{},{},{},{}\n", num(x), num(direct), num(r1), num(r2), num(r3));
    }
  }
  emit(f.output, out, csv);
  return kExitOk;
}

int cmd_oracle_check(const ModelOptions& o, double resolution, double theta_resolution,
                     std::ostream& out) {
  const Instance in = build_instance(o);
  const double pr = budget(o.pr_db, o.pr_linear, "pr");
  const double tol = in.opts.cfg.tol_rate;
  OracleResult oracle;
  std::optional<double> solver;
  if (in.opts.model == "parallel-async") {
    const ParallelProblem pp{in.subchannels, in.p, pr};
    oracle = grid_maxmin_parallel(pp, resolution);
    solver = async_optimize(pp, in.opts.cfg).rate_bits;
  } else if (in.opts.model == "parallel-sync") {
    const ParallelProblem pp{in.subchannels, in.p, pr};
    oracle = grid_sync_parallel(pp, resolution);
    if (auto s = sync_case1_optimize(pp, in.opts.cfg)) solver = s->rate_bits;
  } else {
    FadingModel model = FadingModel::kFullDuplexLower;
    const bool upper = in.opts.bound == "upper";
    if (in.opts.model == "full-duplex") {
      model = upper ? FadingModel::kFullDuplexUpper : FadingModel::kFullDuplexLower;
    } else if (in.scenario() == Scenario::kI) {
      model = FadingModel::kScenarioI;
    } else if (in.scenario() == Scenario::kII) {
      model = upper ? FadingModel::kScenarioIIUpper : FadingModel::kScenarioII;
    } else {
      model = upper ? FadingModel::kScenarioIIIUpper : FadingModel::kScenarioIII;
    }
    oracle = grid_maxmin_fading(*in.ensemble, in.p, pr, model, resolution, theta_resolution);
    solver = solve_instance(in, pr).sol.rate_bits;
  }
  out << fmt::format("model      {}\n", in.label());
  out << fmt::format("oracle     {:.8f} bits  (gap {:.3e}, {} grid points)\n", oracle.value,
                     oracle.gap, oracle.evaluations);
  if (!solver) {
    out << "solver     not applicable (synchronized equalizer regime)\n";
    return kExitNumerical;
  }
  const double diff = *solver - oracle.value;
  const bool ok = std::abs(diff) <= oracle.gap + tol && diff >= -tol;
  out << fmt::format("solver     {:.8f} bits\n", *solver);
  out << fmt::format("difference {:.3e}  {}\n", diff, ok ? "PASS" : "FAIL");
  return ok ? kExitOk : kExitMismatch;
}

}  // namespace

SubchannelSpec parse_subchannel(const std::string& text) {
  const auto parts = split(text, ':');
  if (parts.size() != 4) {
    throw ParseError(
        fmt::format("subchannel '{}': expected CLASS:sigma_r_sq:sigma_sq:rho_r", text));
  }
  std::string cls(parts[0]);
  for (char& c : cls) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  if (cls != "A" && cls != "AC") {
    throw ParseError(fmt::format("subchannel '{}': class must be A or Ac", text));
  }
  const double sigma_r_sq = parse_number(parts[1], "sigma_r_sq");
  const double sigma_sq = parse_number(parts[2], "sigma_sq");
  const double rho_r = parse_number(parts[3], "rho_r");
  if (!(sigma_r_sq > 0.0) || !(sigma_sq > 0.0) || !(rho_r > 0.0)) {
    throw ParseError(fmt::format("subchannel '{}': variances and rho_r must be > 0", text));
  }
  SubchannelSpec spec(sigma_sq, sigma_r_sq, rho_r);
  const bool claimed_a = cls == "A";
  if (claimed_a != spec.in_a()) {
    throw ParseError(fmt::format("subchannel '{}': class {} contradicts sigma_r_sq {} sigma_sq {}",
                                 text, parts[0], sigma_r_sq, sigma_sq));
  }
  return spec;
}

std::vector<double> parse_db_range(const std::string& text) {
  const auto parts = split(text, ':');
  if (parts.size() != 3) throw ParseError(fmt::format("range '{}': expected lo:hi:step", text));
  const double lo = parse_number(parts[0], "range lo");
  const double hi = parse_number(parts[1], "range hi");
  const double step = parse_number(parts[2], "range step");
  if (!(step > 0.0)) throw ParseError(fmt::format("range '{}': step must be > 0", text));
  if (hi < lo) throw ParseError(fmt::format("range '{}' is empty", text));
  const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
  if (count > 100000) throw ParseError(fmt::format("range '{}' has too many points", text));
  std::vector<double> axis(count);
  for (std::size_t i = 0; i < count; ++i) {
    axis[i] = std::round((lo + static_cast<double>(i) * step) * 1e9) / 1e9;
  }
  return axis;
}

double direct_link_rate(const StateEnsemble& ensemble, double p_budget) {
  const std::size_t n = ensemble.size();
  std::vector<double> noise(n), w(n), scale(n, 1.0);
  for (std::size_t k = 0; k < n; ++k) {
    const FadingState& s = ensemble[k];
    w[k] = s.weight;
    noise[k] = s.g1 > 0.0 ? 1.0 / s.g1 : std::numeric_limits<double>::infinity();
  }
  const WaterfillResult wf = waterfill(noise, w, scale, p_budget);
  return expectation(ensemble, [&](const FadingState& s) {
    const std::size_t k = static_cast<std::size_t>(&s - &ensemble[0]);
    return std::log2(1.0 + wf.allocation[k] * s.g1);
  });
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Capacity bounds and optimal resource allocation for relay channels", "relaycap"};
  app.require_subcommand(1);

  ModelOptions solve_opts;
  std::string solve_output = "solution.json";
  CLI::App* solve = app.add_subcommand("solve", "Solve one instance");
  add_model_options(*solve, solve_opts, true);
  solve->add_option("--output", solve_output, "Solution JSON path ('-' to skip)")
      ->capture_default_str();

  ModelOptions sweep_opts;
  std::string sweep_range, sweep_output;
  CLI::App* sweep = app.add_subcommand("sweep", "Sweep the relay budget, CSV output");
  add_model_options(*sweep, sweep_opts, false);
  sweep->add_option("--pr-db-range", sweep_range, "lo:hi:step in dB")->required();
  sweep->add_option("--output", sweep_output, "CSV path (default stdout)");

  FigureOptions fig;
  CLI::App* figure = app.add_subcommand("figure", "Data behind fig5, fig6, fig7 or fig8");
  figure->add_option("name", fig.name, "fig5 | fig6 | fig7 | fig8")->required();
  figure->add_option("--samples", fig.samples, "Rayleigh sample count")->capture_default_str();
  figure->add_option("--seed", fig.seed)->capture_default_str();
  figure->add_option("--p-db", fig.p_db, "Source budget, dB")->capture_default_str();
  figure->add_option("--pr-db-range", fig.range, "Override the relay-budget axis lo:hi:step");
  figure->add_option("--output", fig.output, "CSV path (default stdout)");

  ModelOptions check_opts;
  double resolution = 0.01, theta_resolution = 0.0;
  CLI::App* check = app.add_subcommand("oracle-check", "Compare a solver with the grid oracle");
  add_model_options(*check, check_opts, true);
  check->add_option("--resolution", resolution, "Budget grid step (fraction)")
      ->capture_default_str();
  check->add_option("--theta-resolution", theta_resolution, "Theta grid step (0: same)");

  std::vector<std::string> argv(args.rbegin(), args.rend());
  try {
    app.parse(argv);
  } catch (const CLI::CallForHelp&) {
    const auto subs = app.get_subcommands();
    out << (subs.empty() ? app.help() : subs.front()->help());
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    const auto subs = app.get_subcommands();
    err << "error: " << e.what() << "\n\n" << (subs.empty() ? app.help() : subs.front()->help());
    return kExitInput;
  }

  try {
    if (*solve) return cmd_solve(solve_opts, solve_output, out);
    if (*sweep) return cmd_sweep(sweep_opts, sweep_range, sweep_output, out);
    if (*figure) return cmd_figure(fig, out);
    return cmd_oracle_check(check_opts, resolution, theta_resolution, out);
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const ConvergenceError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const BracketError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const InvariantError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  }
}

}  // namespace relaycap
