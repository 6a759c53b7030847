#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "evd/core/log_math.hpp"
#include "evd/core/model.hpp"
#include "evd/smc/resample.hpp"

namespace evd {

/// i.i.d. exponential families whose sufficient statistic over k fresh units
/// can be drawn directly, and whose Gibbs sweep is an exact fresh draw. AIS
/// then only needs to track S.
template <class M>
concept HasStatDraw = ExponentialFamilyModel<M> && IidUnits<M> &&
                      requires(const M& m, const Eigen::VectorXd& eta, std::size_t k, RngStream& rng) {
                        { m.draw_stats(eta, k, rng) } -> std::same_as<Eigen::VectorXd>;
                      };

inline BiasClass sim_bias(const SimConfig& sim) {
  return sim.mode == SimMode::exact ? BiasClass::unbiased : BiasClass::biased;
}

// ------------------------------------------------------------ SAV

/// log q_u(u) - log gamma(u|theta) for one auxiliary draw.
template <UnnormalisedModel M, class Aux>
double sav_log_term(const M& model, const ParameterVector& theta, const typename M::Data& u, std::size_t k,
                    const Aux& q_u) {
  return q_u.log_density(u, 0, k) - model.log_gamma(u, theta, k);
}

/// Importance-sampling estimate of 1/Z(theta) on k units from M draws
/// u ~ f(.|theta). A draw with gamma(u|theta) = 0 gives +inf (flagged).
template <UnnormalisedModel M, class Aux>
  requires BlockAuxiliary<Aux, typename M::Data>
LogWeightEstimate sav_inv_z(const M& model, const ParameterVector& theta, std::size_t k, const Aux& q_u,
                            std::size_t points, const SimConfig& sim, RngStream& rng) {
  if (points == 0) throw ContractViolation("sav_inv_z needs M >= 1");
  std::vector<double> terms(points);
  for (std::size_t m = 0; m < points; ++m) {
    const auto u = model.simulate(theta, k, rng, sim);
    terms[m] = sav_log_term(model, theta, u, k, q_u);
  }
  return {log_mean_exp(terms), sim_bias(sim), points * sim.draw_cost()};
}

// ------------------------------------------------------------ AIS

/// K intermediate targets and M independent AIS runs. Target j of the path
/// has natural parameter (1 - j/(K+1)) eta(theta) + j/(K+1) eta(theta_hat).
struct AisPath {
  std::size_t K = 1;
  std::size_t M = 1;
};

/// log AIS weight of one path u_0, ..., u_K, where u_0 ~ f(.|theta) and u_j is
/// the state after the move targeting intermediate j:
/// sum_{j=1}^{K+1} log gamma_j(u_{j-1}) - log gamma_{j-1}(u_{j-1}).
template <ExponentialFamilyModel M>
double ais_path_log_weight(const M& model, const ParameterVector& theta, const ParameterVector& theta_hat,
                           std::size_t k, std::span<const typename M::Data> states) {
  const double steps = static_cast<double>(states.size());
  const Eigen::VectorXd d = (model.natural(theta_hat) - model.natural(theta)) / steps;
  double lw = 0.0;
  for (const auto& u : states) lw += d.dot(model.stats(u, k));
  return lw;
}

/// AIS estimate of Z(theta_hat) / Z(theta) on k units, averaged over M paths.
/// K = 0 is the single-ratio form gamma(u|theta_hat)/gamma(u|theta).
template <ExponentialFamilyModel M>
LogWeightEstimate mav_ratio(const M& model, const ParameterVector& theta, const ParameterVector& theta_hat,
                            std::size_t k, const AisPath& path, const SimConfig& sim, RngStream& rng) {
  if (path.M == 0) throw ContractViolation("mav_ratio needs M >= 1");
  const Eigen::VectorXd eta0 = model.natural(theta);
  const Eigen::VectorXd d = (model.natural(theta_hat) - eta0) / static_cast<double>(path.K + 1);
  std::vector<double> terms(path.M);
  for (std::size_t m = 0; m < path.M; ++m) {
    double lw = 0.0;
    bool done = false;
    if constexpr (HasStatDraw<M>) {
      if (sim.mode == SimMode::exact) {
        for (std::size_t j = 0; j <= path.K; ++j)
          lw += d.dot(model.draw_stats(eta0 + static_cast<double>(j) * d, k, rng));
        done = true;
      }
    }
    if (!done) {
      auto u = model.draw_natural(eta0, k, rng, sim);
      lw = d.dot(model.stats(u, k));
      for (std::size_t j = 1; j <= path.K; ++j) {
        model.sweep_natural(u, eta0 + static_cast<double>(j) * d, k, rng);
        lw += d.dot(model.stats(u, k));
      }
    }
    terms[m] = lw;
  }
  return {log_mean_exp(terms), sim_bias(sim), path.M * (sim.draw_cost() + path.K)};
}

// ------------------------------------------------------------ SMC in data space

struct SmcLogZResult {
  double log_z = 0.0;
  double min_ess = 0.0;
  std::size_t resamples = 0;
  /// Steps at which the ESS fell to a single particle.
  std::size_t collapses = 0;
  std::uint64_t sweeps = 0;
};

/// log Z(theta_hat) on k units by SMC over u along eta_i = (i/T) eta(theta_hat),
/// starting from exact draws of the base measure (eta = 0). Particles are
/// resampled (stratified) when ESS < resample_fraction * P and then moved by
/// one Gibbs sweep.
template <ExponentialFamilyModel M>
SmcLogZResult smc_log_z(const M& model, const ParameterVector& theta_hat, std::size_t k, std::size_t particles,
                        std::size_t targets, double resample_fraction, RngStream& rng) {
  if (particles == 0) throw ContractViolation("smc_log_z needs P >= 1");
  SmcLogZResult out;
  out.log_z = model.log_z_base(k);
  out.min_ess = static_cast<double>(particles);
  if (targets == 0) return out;
  const Eigen::VectorXd eta_hat = model.natural(theta_hat);
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(eta_hat.size());
  std::vector<typename M::Data> u;
  u.reserve(particles);
  for (std::size_t p = 0; p < particles; ++p) u.push_back(model.draw_natural(zero, k, rng, SimConfig::exact()));
  std::vector<double> log_w(particles, -std::log(static_cast<double>(particles)));
  std::vector<double> inc(particles);
  const Eigen::VectorXd d = eta_hat / static_cast<double>(targets);
  for (std::size_t t = 1; t <= targets; ++t) {
    for (std::size_t p = 0; p < particles; ++p) inc[p] = d.dot(model.stats(u[p], k));
    std::vector<double> joint(particles);
    for (std::size_t p = 0; p < particles; ++p) joint[p] = log_w[p] + inc[p];
    out.log_z += log_sum_exp(joint);
    normalise_log_weights(joint);
    log_w = joint;
    const double e = ess(log_w);
    out.min_ess = std::min(out.min_ess, e);
    if (e < 1.0 + 1e-9) ++out.collapses;
    if (e < resample_fraction * static_cast<double>(particles)) {
      const auto idx = resample_indices(log_w, particles, ResampleScheme::stratified, rng);
      std::vector<typename M::Data> next;
      next.reserve(particles);
      for (auto i : idx) next.push_back(u[i]);
      u = std::move(next);
      std::fill(log_w.begin(), log_w.end(), -std::log(static_cast<double>(particles)));
      ++out.resamples;
    }
    const Eigen::VectorXd eta_t = static_cast<double>(t) * d;
    for (auto& x : u) model.sweep_natural(x, eta_t, k, rng);
    out.sweeps += particles;
  }
  return out;
}

// ------------------------------------------------------------ tempering ratios

/// One term of the importance-sampling estimate of Z_{t-1}/Z_t when units
/// [begin, end) are added: gamma_{t-1}(v) q_w(w) / gamma_t(u), u = (v, w) on
/// the first `end` units. For i.i.d. models pass u as the block alone
/// (begin = 0, end = block size): the prefix factors cancel.
template <UnnormalisedModel M, class Aux>
double tempering_is_term(const M& model, const ParameterVector& theta, const typename M::Data& u, std::size_t begin,
                         std::size_t end, const Aux& q_w) {
  const double prefix = begin == 0 ? 0.0 : model.log_gamma(u, theta, begin);
  return prefix + q_w.log_density(u, begin, end) - model.log_gamma(u, theta, end);
}

/// Unbiased (with exact draws) estimate of Z_{t-1}(theta)/Z_t(theta) from M
/// draws of f_t. For i.i.d. units only the new block is simulated.
template <UnnormalisedModel M, class Aux>
  requires BlockAuxiliary<Aux, typename M::Data>
LogWeightEstimate tempering_is_ratio(const M& model, const ParameterVector& theta, std::size_t begin,
                                     std::size_t end, const Aux& q_w, std::size_t points, const SimConfig& sim,
                                     RngStream& rng) {
  if (points == 0 || end <= begin) throw ContractViolation("tempering_is_ratio: need M >= 1 and a non-empty block");
  std::vector<double> terms(points);
  for (std::size_t m = 0; m < points; ++m) {
    if constexpr (IidUnits<M>) {
      const auto w = model.simulate(theta, end - begin, rng, sim);
      terms[m] = tempering_is_term(model, theta, w, 0, end - begin, q_w);
    } else {
      const auto u = model.simulate(theta, end, rng, sim);
      terms[m] = tempering_is_term(model, theta, u, begin, end, q_w);
    }
  }
  return {log_mean_exp(terms), sim_bias(sim), points * sim.draw_cost()};
}

/// Ratio-of-sums bridge estimate of Z_{t-1}(theta)/Z_t(theta): M/2 draws
/// u ~ f_t give [gamma_{t-1}(v) q_w(w) / gamma_t(u)]^{1/2} in the numerator,
/// M/2 draws v ~ f_{t-1}, w ~ q_w give [gamma_t(u) / (gamma_{t-1}(v) q_w(w))]^{1/2}
/// in the denominator. Always biased.
template <UnnormalisedModel M, class Aux>
  requires BlockAuxiliary<Aux, typename M::Data>
LogWeightEstimate bridge_ratio(const M& model, const ParameterVector& theta, std::size_t begin, std::size_t end,
                               const Aux& q_w, std::size_t points, const SimConfig& sim, RngStream& rng) {
  if (points < 2 || points % 2 != 0) throw ContractViolation("bridge_ratio needs an even M >= 2");
  if (end <= begin) throw ContractViolation("bridge_ratio: empty block");
  const std::size_t half = points / 2;
  std::vector<double> num(half), den(half);
  for (std::size_t m = 0; m < half; ++m) {
    if constexpr (IidUnits<M>) {
      const std::size_t b = end - begin;
      const auto w1 = model.simulate(theta, b, rng, sim);
      num[m] = 0.5 * tempering_is_term(model, theta, w1, 0, b, q_w);
      typename M::Data w2;
      q_w.fill(w2, 0, b, rng);
      den[m] = -0.5 * tempering_is_term(model, theta, w2, 0, b, q_w);
    } else {
      const auto u1 = model.simulate(theta, end, rng, sim);
      num[m] = 0.5 * tempering_is_term(model, theta, u1, begin, end, q_w);
      auto u2 = model.simulate(theta, begin, rng, sim);
      q_w.fill(u2, begin, end, rng);
      den[m] = -0.5 * tempering_is_term(model, theta, u2, begin, end, q_w);
    }
  }
  return {log_sum_exp(num) - log_sum_exp(den), BiasClass::biased, points * sim.draw_cost()};
}

}  // namespace evd
