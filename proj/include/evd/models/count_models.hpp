#pragma once

#include <cstdint>
#include <vector>

#include "evd/core/model.hpp"

namespace evd {

using Counts = std::vector<std::int64_t>;

/// y_i ~ Poisson(lambda), lambda ~ Exp(1), written with
/// gamma(y|lambda) = prod lambda^{y_i} / y_i! and Z(lambda) = exp(n lambda).
class PoissonModel {
 public:
  using Data = Counts;
  static constexpr bool iid_units = true;

  std::size_t dim() const { return 1; }
  std::size_t units(const Data& y) const { return y.size(); }

  double log_prior(const ParameterVector& theta) const;
  ParameterVector sample_prior(RngStream& rng) const;
  double log_gamma(const Data& y, const ParameterVector& theta, std::size_t k) const;
  Data simulate(const ParameterVector& theta, std::size_t k, RngStream& rng, const SimConfig& sim) const;
  double exact_log_z(const ParameterVector& theta, std::size_t k) const;
  /// (sum y_i, sum log y_i!): shared with GeometricModel so that ABC / SL
  /// marginals of the two models are comparable.
  SummaryVector summary(const Data& y) const;
  ParameterVector posterior_draw(const Data& y, std::size_t k, RngStream& rng) const;

  // Exponential family view: eta = log lambda, S = sum y_i, h = 1 / prod y_i!.
  Eigen::VectorXd natural(const ParameterVector& theta) const;
  Eigen::VectorXd stats(const Data& y, std::size_t k) const;
  double log_base(const Data& y, std::size_t k) const;
  Data draw_natural(const Eigen::VectorXd& eta, std::size_t k, RngStream& rng, const SimConfig& sim) const;
  void sweep_natural(Data& u, const Eigen::VectorXd& eta, std::size_t k, RngStream& rng) const;
  double log_z_base(std::size_t k) const { return static_cast<double>(k); }

  /// S over k fresh units drawn directly (S ~ Poisson(k lambda)).
  Eigen::VectorXd draw_stats(const Eigen::VectorXd& eta, std::size_t k, RngStream& rng) const;
  /// Summaries of `count` fresh k-unit datasets at theta.
  std::vector<SummaryVector> simulate_summaries(const ParameterVector& theta, std::size_t k, std::size_t count,
                                                RngStream& rng) const;
};

/// y_i ~ Geometric(p) on {0, 1, ...}, p ~ Unif(0, 1), written with
/// gamma(y|p) = prod (1 - p)^{y_i} and Z(p) = p^{-n}.
class GeometricModel {
 public:
  using Data = Counts;
  static constexpr bool iid_units = true;

  std::size_t dim() const { return 1; }
  std::size_t units(const Data& y) const { return y.size(); }

  double log_prior(const ParameterVector& theta) const;
  ParameterVector sample_prior(RngStream& rng) const;
  double log_gamma(const Data& y, const ParameterVector& theta, std::size_t k) const;
  Data simulate(const ParameterVector& theta, std::size_t k, RngStream& rng, const SimConfig& sim) const;
  double exact_log_z(const ParameterVector& theta, std::size_t k) const;
  SummaryVector summary(const Data& y) const;
  ParameterVector posterior_draw(const Data& y, std::size_t k, RngStream& rng) const;

  // eta = log(1 - p), S = sum y_i, h = 1.
  Eigen::VectorXd natural(const ParameterVector& theta) const;
  Eigen::VectorXd stats(const Data& y, std::size_t k) const;
  double log_base(const Data&, std::size_t) const { return 0.0; }
  Data draw_natural(const Eigen::VectorXd& eta, std::size_t k, RngStream& rng, const SimConfig& sim) const;
  void sweep_natural(Data& u, const Eigen::VectorXd& eta, std::size_t k, RngStream& rng) const;
  /// The base measure is counting measure on N^k, which has no finite mass.
  [[noreturn]] double log_z_base(std::size_t k) const;

  /// S ~ NegativeBinomial(k, p).
  Eigen::VectorXd draw_stats(const Eigen::VectorXd& eta, std::size_t k, RngStream& rng) const;
  std::vector<SummaryVector> simulate_summaries(const ParameterVector& theta, std::size_t k, std::size_t count,
                                                RngStream& rng) const;
};

/// log p(y) under the Poisson / Exp(1) model, closed form.
double poisson_log_evidence(const Counts& y);
/// log p(y) under the Geometric / Unif(0,1) model: log B(n + 1, S + 1).
double geometric_log_evidence(const Counts& y);

}  // namespace evd
