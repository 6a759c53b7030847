#pragma once

#include <cstdint>
#include <string>

#include "evd/core/types.hpp"

namespace evd {

/// Outcome of one evidence-estimator run.
struct RunReport {
  std::string estimator;
  double log_evidence = kNegInf;
  BiasClass bias = BiasClass::exact;
  double ess = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t sweeps = 0;
  std::size_t particles = 0;
  std::size_t zero_weights = 0;
  /// Proposals with zero prior density (no simulation spent on them).
  std::size_t outside_support = 0;
  std::size_t singular = 0;
  std::size_t degeneracy_warnings = 0;
  /// ABC and SL estimate the marginal density of the summary statistic, not p(y).
  bool summary_marginal = false;

  /// -inf (every weight zero) or NaN estimates are flagged, not thrown.
  bool flagged() const { return !std::isfinite(log_evidence); }
};

}  // namespace evd
