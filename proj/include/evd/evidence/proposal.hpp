#pragma once

#include <functional>
#include <string>

#include "evd/core/model.hpp"

namespace evd {

/// Importance proposal q(theta) over parameter space.
class IsProposal {
 public:
  using Sampler = std::function<ParameterVector(RngStream&)>;
  using LogDensity = std::function<double(const ParameterVector&)>;

  IsProposal(std::string kind, Sampler sample, LogDensity log_density)
      : kind_(std::move(kind)), sample_(std::move(sample)), log_density_(std::move(log_density)) {}

  /// q = prior of the model (the model must outlive the proposal).
  template <UnnormalisedModel M>
  static IsProposal prior(const M& model) {
    return IsProposal(
        "prior", [&model](RngStream& rng) { return model.sample_prior(rng); },
        [&model](const ParameterVector& t) { return model.log_prior(t); });
  }

  /// Multivariate normal; throws DomainError unless the covariance is
  /// symmetric positive definite.
  static IsProposal gaussian(Eigen::VectorXd mean, Eigen::MatrixXd covariance);

  ParameterVector sample(RngStream& rng) const { return sample_(rng); }
  double log_density(const ParameterVector& theta) const { return log_density_(theta); }
  const std::string& kind() const { return kind_; }

 private:
  std::string kind_;
  Sampler sample_;
  LogDensity log_density_;
};

}  // namespace evd
