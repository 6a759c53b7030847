#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace evd {

/// Model parameter. Dimension and meaning are fixed by the model.
using ParameterVector = Eigen::VectorXd;

/// Summary statistics of a dataset (ABC / synthetic likelihood).
using SummaryVector = Eigen::VectorXd;

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// Precondition broken by the caller (empty input, bad sizes, ...).
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Input outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Operation not available for this model or size.
class Unsupported : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Unrecoverable numerical failure (NaN weights and similar).
class NumericalAbort : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class SimMode { exact, gibbs };

/// How a model draws from f(.|theta): exactly, or by B Gibbs sweeps from a
/// random start.
struct SimConfig {
  SimMode mode = SimMode::exact;
  std::uint32_t burn_in = 0;

  /// Sweep-equivalents charged for one fresh draw. A Gibbs draw counts its
  /// random initialisation as one sweep.
  std::uint64_t draw_cost() const { return mode == SimMode::exact ? 1 : std::uint64_t{burn_in} + 1; }

  static SimConfig exact() { return {}; }
  static SimConfig gibbs(std::uint32_t b) { return {SimMode::gibbs, b}; }
};

/// Ordered: combining two estimates keeps the worse class.
enum class BiasClass { exact = 0, unbiased = 1, biased = 2 };

inline BiasClass combine(BiasClass a, BiasClass b) { return a > b ? a : b; }

inline const char* to_string(BiasClass c) {
  switch (c) {
    case BiasClass::exact: return "exact";
    case BiasClass::unbiased: return "unbiased";
    case BiasClass::biased: return "biased";
  }
  return "?";
}

/// A log-domain estimate of a positive quantity (1/Z, a Z ratio, a weight).
struct LogWeightEstimate {
  double log_value = 0.0;
  BiasClass bias = BiasClass::exact;
  std::uint64_t sweeps = 0;

  /// +inf (zero denominator, gamma(u)=0) and -inf (all terms zero) are kept
  /// as flagged values rather than thrown.
  bool finite() const { return std::isfinite(log_value); }
};

}  // namespace evd
