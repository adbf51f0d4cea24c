#include "relaycap/sampling.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "summation.hpp"

namespace relaycap {

namespace {

double unit_exponential(std::mt19937_64& rng) {
  const std::uint64_t x = rng();
  const double u = (static_cast<double>(x >> 11) + 0.5) * 0x1.0p-53;
  return -std::log(u);
}

double parse_field(std::string_view text, std::string_view source, std::size_t line,
                   std::string_view column) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v)) {
    throw ParseError(fmt::format("{}:{}: column {}: '{}' is not a finite number", source, line,
                                 column, text));
  }
  if (v < 0.0) {
    throw ParseError(fmt::format("{}:{}: column {} is negative ({})", source, line, column, v));
  }
  return v;
}

}  // namespace

StateEnsemble generate_rayleigh_ensemble(std::size_t n, std::uint64_t seed, double rho1,
                                         double rho2, double rho3) {
  if (n == 0) throw DomainError("generate_rayleigh_ensemble: n must be >= 1");
  for (double rho : {rho1, rho2, rho3}) {
    if (!std::isfinite(rho) || !(rho > 0.0)) {
      throw DomainError(fmt::format("generate_rayleigh_ensemble: gain {} must be > 0", rho));
    }
  }
  std::mt19937_64 rng(seed);
  const double w = 1.0 / static_cast<double>(n);
  std::vector<FadingState> states(n);
  for (FadingState& s : states) {
    s.weight = w;
    s.g1 = rho1 * unit_exponential(rng);
    s.g2 = rho2 * unit_exponential(rng);
    s.g3 = rho3 * unit_exponential(rng);
  }
  // n copies of fl(1/n) can miss 1 by more than the ensemble tolerance.
  detail::CompensatedSum total;
  for (const FadingState& s : states) total.add(s.weight);
  if (std::abs(total.value() - 1.0) > 1e-13) {
    for (FadingState& s : states) s.weight /= total.value();
  }
  return StateEnsemble(std::move(states));
}

StateEnsemble load_ensemble(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(fmt::format("cannot open ensemble file '{}'", path.string()));
  return parse_ensemble(in, path.string());
}

StateEnsemble parse_ensemble(std::istream& in, std::string_view source_name) {
  std::string line;
  std::size_t line_no = 0;
  auto next_line = [&]() {
    if (!std::getline(in, line)) return false;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  };
  if (!next_line()) throw ParseError(fmt::format("{}: empty file", source_name));
  if (line != "weight,g1,g2,g3") {
    throw ParseError(fmt::format("{}:1: header must be 'weight,g1,g2,g3', got '{}'", source_name,
                                 line));
  }
  static constexpr std::string_view kColumns[] = {"weight", "g1", "g2", "g3"};
  std::vector<FadingState> states;
  while (next_line()) {
    if (line.empty()) continue;
    std::vector<std::string_view> fields;
    std::string_view rest = line;
    while (true) {
      const auto comma = rest.find(',');
      fields.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (fields.size() != 4) {
      throw ParseError(fmt::format("{}:{}: expected 4 columns, found {}", source_name, line_no,
                                   fields.size()));
    }
    double v[4];
    for (int i = 0; i < 4; ++i) v[i] = parse_field(fields[i], source_name, line_no, kColumns[i]);
    if (!(v[0] > 0.0)) {
      throw ParseError(fmt::format("{}:{}: weight must be > 0", source_name, line_no));
    }
    states.push_back({v[0], v[1], v[2], v[3]});
  }
  if (states.empty()) throw ParseError(fmt::format("{}: no states", source_name));
  detail::CompensatedSum total;
  for (const FadingState& s : states) total.add(s.weight);
  const double t = total.value();
  if (!(t >= 0.999 && t <= 1.001)) {
    throw ParseError(fmt::format("{}: weights sum to {}, expected 1 (within 1e-3)", source_name, t));
  }
  for (FadingState& s : states) s.weight /= t;
  return StateEnsemble(std::move(states));
}

void write_ensemble(std::ostream& out, const StateEnsemble& ensemble) {
  out << "weight,g1,g2,g3\n";
  for (const FadingState& s : ensemble.states()) {
    out << fmt::format("{},{},{},{}\n", s.weight, s.g1, s.g2, s.g3);
  }
}

double expectation(const StateEnsemble& ensemble,
                   const std::function<double(const FadingState&)>& f) {
  detail::CompensatedSum sum;
  for (std::size_t k = 0; k < ensemble.size(); ++k) {
    const FadingState& s = ensemble[k];
    const double v = f(s);
    if (!std::isfinite(v)) {
      throw DomainError(fmt::format("expectation: non-finite value {} at state {}", v, k));
    }
    sum.add(s.weight * v);
  }
  return sum.value();
}

}  // namespace relaycap
