// Domain types and the capacity kernel shared by every relay-channel solver.
//
// Rates are always reported in bits per channel use. Powers are linear
// (not dB). Every type here is an immutable value once constructed.
#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace relaycap {

// ---------------------------------------------------------------------------
// Errors

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// An iterative solver hit its iteration cap.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// A scalar root search was handed an interval without a sign change.
class BracketError : public Error {
 public:
  using Error::Error;
};

/// Malformed external input (ensemble files, CLI literals).
class ParseError : public Error {
 public:
  using Error::Error;
};

/// A property the math guarantees did not hold. Indicates a bug, never bad input.
class InvariantError : public Error {
 public:
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Capacity kernel

/// C(x) = 1/2 log2(1 + x).
double cap_real(double snr);

/// 10^(x/10).
double db_to_linear(double x_db);

/// Limit-safe t * log2(1 + x / t) with the continuous extension 0 at t = 0.
/// This is 2t C(x/t), the rate of a channel used a fraction t of the time.
double time_shared_rate(double x, double t);

// ---------------------------------------------------------------------------
// Parallel relay channel

enum class DegradedClass { kA, kAc };

std::string_view to_string(DegradedClass c);

/// One degraded Gaussian subchannel. Class A (relay hears better than the
/// destination) is derived from the variances and never stored.
class SubchannelSpec {
 public:
  SubchannelSpec(double sigma_sq, double sigma_r_sq, double rho_r);

  double sigma_sq() const { return sigma_sq_; }
  double sigma_r_sq() const { return sigma_r_sq_; }
  double rho_r() const { return rho_r_; }

  DegradedClass degraded_class() const {
    return sigma_r_sq_ < sigma_sq_ ? DegradedClass::kA : DegradedClass::kAc;
  }
  bool in_a() const { return degraded_class() == DegradedClass::kA; }

 private:
  double sigma_sq_;
  double sigma_r_sq_;
  double rho_r_;
};

// ---------------------------------------------------------------------------
// Fading ensembles

/// Effective link gains of one fading state: g1 = rho1|h1|^2 (source to
/// destination), g2 = rho2|h2|^2 (relay to destination), g3 = rho3|h3|^2
/// (source to relay).
struct FadingState {
  double weight = 1.0;
  double g1 = 0.0;
  double g2 = 0.0;
  double g3 = 0.0;

  /// Strict: ties g3 == g1 belong to A^c.
  bool in_a() const { return g3 > g1; }
};

/// Finite probability measure over fading states. Every expectation in the
/// fading solvers is a weighted sum over one of these.
class StateEnsemble {
 public:
  explicit StateEnsemble(std::vector<FadingState> states);

  std::span<const FadingState> states() const { return states_; }
  std::size_t size() const { return states_.size(); }
  const FadingState& operator[](std::size_t i) const { return states_[i]; }

 private:
  std::vector<FadingState> states_;
};

// ---------------------------------------------------------------------------
// Solver outputs

/// Per-subchannel / per-state powers. `theta` is empty for models without a
/// channel-resource split.
struct Allocation {
  std::vector<double> p;
  std::vector<double> p_r;
  std::vector<double> theta;
};

enum class CaseTag { kCase1R2Binding, kCase2R1Binding, kCase3Equalizer };

std::string_view to_string(CaseTag c);
/// 1, 2 or 3.
int case_number(CaseTag c);

/// One evaluation of the inner maximizer during the alpha search.
struct AlphaProbe {
  double alpha = 0.0;
  double r1 = 0.0;
  double r2 = 0.0;
  double value() const { return alpha * r1 + (1.0 - alpha) * r2; }
};

struct MaxMinSolution {
  CaseTag case_tag = CaseTag::kCase3Equalizer;
  double alpha_star = 0.0;
  double rate_bits = 0.0;
  double r1_bits = 0.0;
  double r2_bits = 0.0;
  Allocation allocation;
  // Budget multipliers in bits per unit (mean) power.
  double lambda = 0.0;
  double mu = 0.0;
  int iterations = 0;
  bool capacity_certified = false;

  // Diagnostics.
  std::vector<AlphaProbe> probes;
  int max_inner_iterations = 0;
  // Most negative per-half-step objective change seen in any inner run
  // (relative to the objective). Non-negative when every run was monotone.
  double worst_half_step_delta = 0.0;
};

struct SolverConfig {
  double tol_budget = 1e-10;
  double tol_rate = 1e-8;
  double tol_root = 1e-12;
  // Relative change of the alpha-weighted objective that ends an alternating
  // maximization.
  double tol_inner = 1e-11;
  int max_outer = 200;
  int max_inner = 500;
  std::uint64_t seed = 20080101;
  std::size_t n_samples = 10000;

  void validate() const;
};

}  // namespace relaycap
