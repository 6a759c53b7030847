#pragma once

#include <algorithm>

#include "evd/evidence/proposal.hpp"
#include "evd/kernels/kernels.hpp"

namespace evd::harness_detail {

struct Design {
  IsProposal proposal;
  ParameterVector theta_hat;
  Eigen::MatrixXd covariance;
  std::uint64_t sweeps = 0;
};

/// Two-stage exchange pilot: a short run at a fixed scale sets the step size
/// of the run whose moments give theta_hat and the Gaussian proposal
/// N(mean, inflation * covariance).
template <UnnormalisedModel M>
Design pilot_design(const M& model, const typename M::Data& y, ParameterVector theta0, std::size_t steps,
                    double inflation, const SimConfig& sim, double scale0, RngStream rng) {
  const TemperedTarget<typename M::Data> target{&y, model.units(y)};
  KernelConfig kc{Eigen::VectorXd::Constant(static_cast<Eigen::Index>(model.dim()), scale0), sim};
  RngStream r1 = rng.child(0), r2 = rng.child(1);
  const auto first = pilot_run(model, target, theta0, std::max<std::size_t>(steps / 4, 1), kc, r1);
  if (!first.degenerate) {
    const double factor = 2.4 / std::sqrt(static_cast<double>(model.dim()));
    kc.scales = (factor * first.covariance.diagonal().array().sqrt()).max(1e-4).matrix();
  }
  const auto second = pilot_run(model, target, first.samples.back(), steps, kc, r2);
  Eigen::MatrixXd cov = second.covariance * inflation;
  if (second.degenerate) cov = Eigen::MatrixXd::Identity(cov.rows(), cov.cols()) * (scale0 * scale0);
  return {IsProposal::gaussian(second.mean, cov), second.mean, cov, first.sweeps + second.sweeps};
}

}  // namespace evd::harness_detail
