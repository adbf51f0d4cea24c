#include "relaycap/core_types.hpp"

#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "summation.hpp"

namespace relaycap {

double cap_real(double snr) {
  if (!std::isfinite(snr) || snr < 0.0) {
    throw DomainError(fmt::format("cap_real: SNR must be finite and >= 0, got {}", snr));
  }
  return 0.5 * std::log2(1.0 + snr);
}

double db_to_linear(double x_db) {
  if (!std::isfinite(x_db)) {
    throw DomainError("db_to_linear: non-finite input");
  }
  return std::pow(10.0, x_db / 10.0);
}

double time_shared_rate(double x, double t) {
  if (t <= 0.0 || x <= 0.0) return 0.0;
  return t * std::log2(1.0 + x / t);
}

std::string_view to_string(DegradedClass c) {
  return c == DegradedClass::kA ? "A" : "Ac";
}

SubchannelSpec::SubchannelSpec(double sigma_sq, double sigma_r_sq, double rho_r)
    : sigma_sq_(sigma_sq), sigma_r_sq_(sigma_r_sq), rho_r_(rho_r) {
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!positive(sigma_sq) || !positive(sigma_r_sq) || !positive(rho_r)) {
    throw DomainError(fmt::format(
        "SubchannelSpec: sigma_sq={}, sigma_r_sq={}, rho_r={} must all be finite and > 0",
        sigma_sq, sigma_r_sq, rho_r));
  }
}

StateEnsemble::StateEnsemble(std::vector<FadingState> states) : states_(std::move(states)) {
  if (states_.empty()) throw DomainError("StateEnsemble: at least one state required");
  detail::CompensatedSum total;
  for (std::size_t i = 0; i < states_.size(); ++i) {
    const FadingState& s = states_[i];
    auto ok = [](double v) { return std::isfinite(v) && v >= 0.0; };
    if (!(std::isfinite(s.weight) && s.weight > 0.0) || !ok(s.g1) || !ok(s.g2) || !ok(s.g3)) {
      throw DomainError(fmt::format("StateEnsemble: invalid state {} (w={}, g=({}, {}, {}))", i,
                                    s.weight, s.g1, s.g2, s.g3));
    }
    total.add(s.weight);
  }
  if (std::abs(total.value() - 1.0) > 1e-12) {
    throw DomainError(
        fmt::format("StateEnsemble: weights sum to {}, expected 1", total.value()));
  }
}

std::string_view to_string(CaseTag c) {
  switch (c) {
    case CaseTag::kCase1R2Binding:
      return "Case1_R2Binding";
    case CaseTag::kCase2R1Binding:
      return "Case2_R1Binding";
    case CaseTag::kCase3Equalizer:
      return "Case3_Equalizer";
  }
  return "?";
}

int case_number(CaseTag c) {
  switch (c) {
    case CaseTag::kCase1R2Binding:
      return 1;
    case CaseTag::kCase2R1Binding:
      return 2;
    case CaseTag::kCase3Equalizer:
      return 3;
  }
  return 0;
}

void SolverConfig::validate() const {
  if (!(tol_budget > 0.0) || !(tol_rate > 0.0) || !(tol_root > 0.0) || !(tol_inner > 0.0)) {
    throw DomainError("SolverConfig: tolerances must be > 0");
  }
  if (max_outer < 1 || max_inner < 1) throw DomainError("SolverConfig: iteration caps must be >= 1");
  if (n_samples < 1) throw DomainError("SolverConfig: n_samples must be >= 1");
}

}  // namespace relaycap
