#pragma once

#include <cmath>
#include <vector>

#include "evd/core/model.hpp"
#include "evd/core/moments.hpp"

namespace evd {

/// pi_t(theta) \propto p(theta) f(y_{1:k}|theta): data y restricted to k units.
template <class Data>
struct TemperedTarget {
  const Data* y = nullptr;
  std::size_t k = 0;
};

struct KernelConfig {
  /// Per-coordinate random-walk standard deviations.
  Eigen::VectorXd scales;
  /// How the exchange move draws its auxiliary data.
  SimConfig sim;
};

struct StepResult {
  ParameterVector theta;
  bool accepted = false;
  std::uint64_t sweeps = 0;
};

inline ParameterVector gaussian_walk(const ParameterVector& theta, const Eigen::VectorXd& scales, RngStream& rng) {
  if (scales.size() != theta.size()) throw ContractViolation("proposal scales do not match the parameter");
  ParameterVector out = theta;
  for (Eigen::Index i = 0; i < out.size(); ++i) out[i] += scales[i] * rng.normal();
  return out;
}

/// log of the exchange acceptance ratio for theta -> proposed with auxiliary
/// data u ~ f_k(.|proposed). Only gamma is evaluated; the random-walk proposal
/// is symmetric. -inf when the proposal has zero prior density.
template <UnnormalisedModel M>
double exchange_log_accept(const M& model, const TemperedTarget<typename M::Data>& target,
                           const ParameterVector& theta, const ParameterVector& proposed,
                           const typename M::Data& u) {
  const double lp_new = model.log_prior(proposed);
  if (lp_new == kNegInf) return kNegInf;
  const auto& y = *target.y;
  const std::size_t k = target.k;
  return lp_new - model.log_prior(theta) + model.log_gamma(y, proposed, k) - model.log_gamma(y, theta, k) +
         model.log_gamma(u, theta, k) - model.log_gamma(u, proposed, k);
}

/// One exchange move targeting pi_t.
template <UnnormalisedModel M>
StepResult exchange_step(const ParameterVector& theta, const M& model, const TemperedTarget<typename M::Data>& target,
                         const KernelConfig& cfg, RngStream& rng) {
  StepResult r{theta, false, 0};
  const ParameterVector proposed = gaussian_walk(theta, cfg.scales, rng);
  if (model.log_prior(proposed) == kNegInf) return r;
  const auto u = model.simulate(proposed, target.k, rng, cfg.sim);
  r.sweeps = cfg.sim.draw_cost();
  const double log_a = exchange_log_accept(model, target, theta, proposed, u);
  if (std::log(rng.uniform()) < log_a) {
    r.theta = proposed;
    r.accepted = true;
  }
  return r;
}

/// One deterministic sweep of single-coordinate Gaussian random-walk MH on a
/// pointwise-evaluable log target. Returns the number of accepted updates.
template <class LogTarget>
std::size_t single_site_mh_sweep(ParameterVector& theta, const LogTarget& log_target, const Eigen::VectorXd& scales,
                                 RngStream& rng, double* current_value = nullptr) {
  if (scales.size() != theta.size()) throw ContractViolation("proposal scales do not match the parameter");
  double cur = current_value ? *current_value : log_target(theta);
  std::size_t accepted = 0;
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    const double old = theta[i];
    const double step = scales[i] * rng.normal();
    const double u = rng.uniform();
    if (step == 0.0) continue;
    theta[i] = old + step;
    const double next = log_target(theta);
    if (next != kNegInf && std::log(u) < next - cur) {
      cur = next;
      ++accepted;
    } else {
      theta[i] = old;
    }
  }
  if (current_value) *current_value = cur;
  return accepted;
}

/// Direct draw from pi_t for conjugate models.
template <UnnormalisedModel M>
ParameterVector perfect_posterior_draw(const M& model, const TemperedTarget<typename M::Data>& target, RngStream& rng) {
  if constexpr (HasPosteriorDraw<M>) {
    return model.posterior_draw(*target.y, target.k, rng);
  } else {
    throw Unsupported("perfect posterior draws need a conjugate model");
  }
}

struct PilotResult {
  std::vector<ParameterVector> samples;
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;
  double acceptance_rate = 0.0;
  std::uint64_t sweeps = 0;
  /// Covariance not positive definite (e.g. the chain never moved).
  bool degenerate = false;
};

/// Exchange chain from theta0 for `steps` iterations (theta0 not included).
template <UnnormalisedModel M>
PilotResult pilot_run(const M& model, const TemperedTarget<typename M::Data>& target, const ParameterVector& theta0,
                      std::size_t steps, const KernelConfig& cfg, RngStream& rng) {
  if (steps == 0) throw ContractViolation("pilot run needs at least one step");
  if (model.log_prior(theta0) == kNegInf) throw ContractViolation("pilot start outside the prior support");
  PilotResult out;
  out.samples.reserve(steps);
  ParameterVector theta = theta0;
  std::size_t accepted = 0;
  for (std::size_t s = 0; s < steps; ++s) {
    auto r = exchange_step(theta, model, target, cfg, rng);
    theta = std::move(r.theta);
    accepted += r.accepted ? 1 : 0;
    out.sweeps += r.sweeps;
    out.samples.push_back(theta);
  }
  const auto m = sample_moments(out.samples);
  out.mean = m.mean;
  out.covariance = m.covariance;
  out.acceptance_rate = static_cast<double>(accepted) / static_cast<double>(steps);
  Eigen::LLT<Eigen::MatrixXd> llt(out.covariance);
  out.degenerate = out.covariance.isZero(0.0) || llt.info() != Eigen::Success;
  return out;
}

}  // namespace evd
