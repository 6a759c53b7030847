#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "evd/core/log_math.hpp"
#include "evd/core/parallel.hpp"
#include "evd/core/report.hpp"
#include "evd/evidence/proposal.hpp"
#include "evd/zratio/zratio.hpp"

namespace evd {

struct AbcConfig {
  double epsilon = 0.1;
  /// Simulations per particle.
  std::size_t R = 100;
};

struct SlConfig {
  /// Simulations per particle for the summary mean and covariance.
  std::size_t M = 100;
};

/// Models that produce summaries of fresh datasets faster than
/// simulate + summary.
template <class M>
concept HasSummarySimulator = UnnormalisedModel<M> && requires(const M& m, const ParameterVector& theta, std::size_t k,
                                                              std::size_t n, RngStream& rng) {
  { m.simulate_summaries(theta, k, n, rng) } -> std::same_as<std::vector<SummaryVector>>;
};

template <UnnormalisedModel M>
std::vector<SummaryVector> simulate_summaries(const M& model, const ParameterVector& theta, std::size_t k,
                                              std::size_t count, const SimConfig& sim, RngStream& rng) {
  if constexpr (HasSummarySimulator<M>) {
    if (sim.mode == SimMode::exact) return model.simulate_summaries(theta, k, count, rng);
  }
  std::vector<SummaryVector> out;
  out.reserve(count);
  for (std::size_t r = 0; r < count; ++r) out.push_back(model.summary(model.simulate(theta, k, rng, sim)));
  return out;
}

namespace detail {

/// Shared IS loop: theta_p ~ q from child stream p, log weight
/// log p(theta) - log q(theta) + extra(theta, rng, report-slot). Particles with
/// zero prior density get weight zero without calling `extra`.
template <class Extra>
RunReport importance_run(std::string name, const IsProposal& q, const std::function<double(const ParameterVector&)>& log_prior,
                         std::size_t particles, RngStream& rng, Extra&& extra) {
  if (particles == 0) throw ContractViolation(name + ": P must be positive");
  std::vector<double> log_w(particles, kNegInf);
  std::vector<std::uint64_t> sweeps(particles, 0);
  std::vector<std::uint8_t> biased(particles, 0), singular(particles, 0), outside(particles, 0);
  parallel_for(particles, [&](std::size_t p) {
    RngStream r = rng.child(p);
    const ParameterVector theta = q.sample(r);
    const double lp = log_prior(theta);
    if (lp == kNegInf) {
      outside[p] = 1;
      return;
    }
    struct Slot {
      std::uint64_t sweeps = 0;
      BiasClass bias = BiasClass::exact;
      bool singular = false;
    } slot;
    const double e = extra(theta, r, slot);
    log_w[p] = lp - q.log_density(theta) + e;
    sweeps[p] = slot.sweeps;
    biased[p] = static_cast<std::uint8_t>(slot.bias);
    singular[p] = slot.singular ? 1 : 0;
  });
  RunReport rep;
  rep.estimator = std::move(name);
  rep.seed = rng.seed();
  rep.particles = particles;
  rep.log_evidence = log_mean_exp(log_w);
  rep.ess = ess(log_w);
  for (std::size_t p = 0; p < particles; ++p) {
    if (log_w[p] == kNegInf) ++rep.zero_weights;
    if (outside[p]) ++rep.outside_support;
    if (std::isnan(log_w[p])) throw NumericalAbort(rep.estimator + ": NaN importance weight");
    rep.sweeps += sweeps[p];
    rep.bias = combine(rep.bias, static_cast<BiasClass>(biased[p]));
    rep.singular += singular[p];
  }
  return rep;
}

}  // namespace detail

/// IS with exact likelihood: weights p(theta) gamma(y|theta) / (q(theta) Z(theta)).
template <HasExactLogZ M>
RunReport ideal_is_log_evidence(const M& model, const typename M::Data& y, const IsProposal& q, std::size_t particles,
                                RngStream& rng) {
  const std::size_t n = model.units(y);
  return detail::importance_run("ideal-is", q, [&](const ParameterVector& t) { return model.log_prior(t); },
                                particles, rng, [&](const ParameterVector& theta, RngStream&, auto&) {
                                  return model.log_gamma(y, theta, n) - model.exact_log_z(theta, n);
                                });
}

/// Single auxiliary variable IS: 1/Z(theta) replaced by the M-point estimate
/// from sav_inv_z with the normalised auxiliary q_u.
template <UnnormalisedModel M, class Aux>
RunReport savis_log_evidence(const M& model, const typename M::Data& y, const IsProposal& q, std::size_t particles,
                             std::size_t points, const Aux& q_u, const SimConfig& sim, RngStream& rng) {
  const std::size_t n = model.units(y);
  return detail::importance_run("savis", q, [&](const ParameterVector& t) { return model.log_prior(t); }, particles,
                                rng, [&](const ParameterVector& theta, RngStream& r, auto& slot) {
                                  const auto est = sav_inv_z(model, theta, n, q_u, points, sim, r);
                                  slot.sweeps = est.sweeps;
                                  slot.bias = est.bias;
                                  return model.log_gamma(y, theta, n) + est.log_value;
                                });
}

/// Multiple auxiliary variable IS: 1/Z(theta) replaced by the AIS estimate of
/// Z(theta_hat)/Z(theta) times exp(-log_z_hat).
template <ExponentialFamilyModel M>
RunReport mavis_log_evidence(const M& model, const typename M::Data& y, const IsProposal& q, std::size_t particles,
                             const AisPath& path, const ParameterVector& theta_hat, double log_z_hat,
                             const SimConfig& sim, RngStream& rng) {
  const std::size_t n = model.units(y);
  return detail::importance_run("mavis", q, [&](const ParameterVector& t) { return model.log_prior(t); }, particles,
                                rng, [&](const ParameterVector& theta, RngStream& r, auto& slot) {
                                  const auto est = mav_ratio(model, theta, theta_hat, n, path, sim, r);
                                  slot.sweeps = est.sweeps;
                                  slot.bias = est.bias;
                                  return model.log_gamma(y, theta, n) + est.log_value - log_z_hat;
                                });
}

/// max_j |s_j - s_obs_j| / scale_j with scale_j = |s_obs_j|, or 1 when s_obs_j = 0.
inline double abc_distance(const SummaryVector& s, const SummaryVector& s_obs) {
  double d = 0.0;
  for (Eigen::Index j = 0; j < s.size(); ++j) {
    const double scale = s_obs[j] == 0.0 ? 1.0 : std::abs(s_obs[j]);
    d = std::max(d, std::abs(s[j] - s_obs[j]) / scale);
  }
  return d;
}

/// ABC-IS with an indicator kernel: estimates the (unnormalised-kernel) ABC
/// marginal of S(y). Only differences between models sharing the summary are
/// meaningful.
template <UnnormalisedModel M>
RunReport abc_is_log_marginal(const M& model, const typename M::Data& y, const IsProposal& q, std::size_t particles,
                              const AbcConfig& abc, const SimConfig& sim, RngStream& rng) {
  if (!(abc.epsilon > 0.0) || abc.R == 0) throw ContractViolation("abc: need epsilon > 0 and R >= 1");
  const std::size_t n = model.units(y);
  const SummaryVector s_obs = model.summary(y);
  auto rep = detail::importance_run("abc-is", q, [&](const ParameterVector& t) { return model.log_prior(t); },
                                    particles, rng, [&](const ParameterVector& theta, RngStream& r, auto& slot) {
                                      const auto sims = simulate_summaries(model, theta, n, abc.R, sim, r);
                                      std::size_t hits = 0;
                                      for (const auto& s : sims) hits += abc_distance(s, s_obs) <= abc.epsilon ? 1 : 0;
                                      slot.sweeps = abc.R * sim.draw_cost();
                                      slot.bias = BiasClass::biased;
                                      return std::log(static_cast<double>(hits) / static_cast<double>(abc.R));
                                    });
  rep.summary_marginal = true;
  return rep;
}

/// log N(s; mu, Sigma) with mu and Sigma = ss'/(M-1) estimated from `sims`.
/// Returns false when Sigma is singular.
inline bool synthetic_log_likelihood(const std::vector<SummaryVector>& sims, const SummaryVector& s, double& out) {
  const auto dim = s.size();
  Eigen::VectorXd mu = Eigen::VectorXd::Zero(dim);
  for (const auto& x : sims) mu += x;
  mu /= static_cast<double>(sims.size());
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(dim, dim);
  for (const auto& x : sims) cov.noalias() += (x - mu) * (x - mu).transpose();
  cov /= static_cast<double>(sims.size() - 1);
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) return false;
  const Eigen::MatrixXd L = llt.matrixL();
  const double min_d = L.diagonal().minCoeff(), max_d = L.diagonal().maxCoeff();
  if (!(min_d > 1e-12 * max_d)) return false;
  const Eigen::VectorXd z = L.triangularView<Eigen::Lower>().solve(s - mu);
  out = -0.5 * z.squaredNorm() - L.diagonal().array().log().sum() -
        0.5 * static_cast<double>(dim) * std::log(2.0 * std::numbers::pi);
  return true;
}

/// Synthetic-likelihood IS. Particles whose simulated covariance is singular
/// get weight zero and are counted in RunReport::singular.
template <UnnormalisedModel M>
RunReport sl_is_log_marginal(const M& model, const typename M::Data& y, const IsProposal& q, std::size_t particles,
                             const SlConfig& sl, const SimConfig& sim, RngStream& rng) {
  const SummaryVector s_obs = model.summary(y);
  if (sl.M < static_cast<std::size_t>(s_obs.size()) + 2)
    throw ContractViolation("synthetic likelihood needs M >= summary dimension + 2");
  const std::size_t n = model.units(y);
  auto rep = detail::importance_run("sl-is", q, [&](const ParameterVector& t) { return model.log_prior(t); }, particles,
                                    rng, [&](const ParameterVector& theta, RngStream& r, auto& slot) {
                                      const auto sims = simulate_summaries(model, theta, n, sl.M, sim, r);
                                      slot.sweeps = sl.M * sim.draw_cost();
                                      slot.bias = BiasClass::biased;
                                      double ll = kNegInf;
                                      if (!synthetic_log_likelihood(sims, s_obs, ll)) {
                                        slot.singular = true;
                                        return kNegInf;
                                      }
                                      return ll;
                                    });
  rep.summary_marginal = true;
  return rep;
}

struct BayesFactor {
  double log_value = std::numeric_limits<double>::quiet_NaN();
  bool defined = false;
  std::string estimators;
  bool summary_marginal = false;
};

/// log BF_12 = log p(y|M1) - log p(y|M2). Undefined when either report is flagged.
inline BayesFactor log_bayes_factor(const RunReport& a, const RunReport& b) {
  BayesFactor bf;
  bf.estimators = a.estimator + "/" + b.estimator;
  bf.summary_marginal = a.summary_marginal || b.summary_marginal;
  if (a.flagged() || b.flagged()) return bf;
  bf.log_value = a.log_evidence - b.log_evidence;
  bf.defined = true;
  return bf;
}

}  // namespace evd
