#pragma once

#include <cmath>
#include <iostream>
#include <optional>
#include <sstream>
#include <vector>

#include "evd/core/log_math.hpp"
#include "evd/core/moments.hpp"
#include "evd/core/parallel.hpp"
#include "evd/core/report.hpp"
#include "evd/kernels/kernels.hpp"
#include "evd/smc/resample.hpp"
#include "evd/zratio/zratio.hpp"

namespace evd {

struct TemperingSchedule {
  enum class Kind { data_point, power };
  Kind kind = Kind::data_point;
  /// data_point: number of targets; each adds units / T units (must divide).
  std::size_t T = 0;
  /// power: increasing exponents ending at 1 (the initial target is the prior).
  std::vector<double> exponents;

  static TemperingSchedule data_point(std::size_t targets) { return {Kind::data_point, targets, {}}; }
  static TemperingSchedule power(std::vector<double> betas) {
    return {Kind::power, betas.size(), std::move(betas)};
  }
};

enum class WeightMode { exact, unbiased_is, biased_bridge };
WeightMode parse_weight_mode(const std::string& name);
const char* to_string(WeightMode m);

struct WeightConfig {
  WeightMode mode = WeightMode::exact;
  /// Internal importance points per particle and step.
  std::size_t M = 1;
  SimConfig sim;
};

struct ResamplingPolicy {
  ResampleScheme scheme = ResampleScheme::systematic;
  bool always = false;
  /// Resample when ESS < threshold * P; 0 disables adaptive resampling.
  double threshold = 0.5;

  static ResamplingPolicy never() { return {ResampleScheme::systematic, false, 0.0}; }
};

enum class MoveKind { exchange, single_site_mh, perfect_posterior, none };
MoveKind parse_move_kind(const std::string& name);
const char* to_string(MoveKind m);

struct MoveConfig {
  MoveKind kind = MoveKind::single_site_mh;
  std::size_t sweeps = 1;
  /// Inner simulation for exchange moves.
  SimConfig sim;
  /// Lower bound on each proposal variance.
  double variance_floor = 1e-6;
  /// Overrides the cloud-based scales at the first target.
  std::optional<Eigen::VectorXd> initial_scales;
};

struct SmcConfig {
  std::size_t P = 100;
  TemperingSchedule schedule;
  WeightConfig weights;
  MoveConfig move;
  ResamplingPolicy resampling;
};

struct SmcTraceRow {
  std::size_t t = 0;
  double ess = 0.0;
  double log_evidence = 0.0;
  double acceptance_rate = 0.0;
  bool resampled = false;
};

struct SmcResult {
  RunReport report;
  std::vector<SmcTraceRow> trace;
  std::vector<ParameterVector> particles;
  std::vector<double> log_weights;
};

/// Placeholder q_w for exact-weight runs.
struct NoAuxiliary {
  template <class Data>
  double log_density(const Data&, std::size_t, std::size_t) const {
    throw ContractViolation("random-weight SMC needs a q_w auxiliary");
  }
  template <class Data>
  void fill(Data&, std::size_t, std::size_t, RngStream&) const {
    throw ContractViolation("random-weight SMC needs a q_w auxiliary");
  }
};

template <class M>
concept HasFastLogTarget = requires(const M& m, const typename M::Data& y, std::size_t k, const ParameterVector& t) {
  { m.make_log_target(y, k)(t) } -> std::convertible_to<double>;
};

namespace detail {

template <UnnormalisedModel M>
auto tempered_log_target(const M& model, const typename M::Data& y, std::size_t k, double beta) {
  return [&model, &y, k, beta](const ParameterVector& t) {
    const double lp = model.log_prior(t);
    if (lp == kNegInf) return kNegInf;
    if constexpr (HasExactLogZ<M>) {
      return lp + beta * (model.log_gamma(y, t, k) - model.exact_log_z(t, k));
    } else {
      throw Unsupported("MH moves need a model with exact log Z");
      return kNegInf;
    }
  };
}

}  // namespace detail

/// Random-weight SMC sampler over theta with data-point (or power) tempering.
///
/// Particles start from the prior. At target t each particle is reweighted
/// by gamma_t(y|theta)/gamma_{t-1}(y|theta) times Z_{t-1}/Z_t(theta), the
/// latter exact or estimated per WeightConfig; the log evidence accumulates
/// log sum_p W_p w_p with W the normalised weights before the step. Then the
/// policy may resample, and the move kernel targets pi_t.
template <UnnormalisedModel M, class Aux = NoAuxiliary>
SmcResult smc_run(const M& model, const typename M::Data& y, const SmcConfig& cfg, RngStream& rng,
                  const Aux& q_w = Aux{}) {
  const std::size_t P = cfg.P;
  if (P == 0) throw ContractViolation("smc_run: P must be positive");
  const std::size_t n = model.units(y);
  const auto& sched = cfg.schedule;
  const std::size_t T = sched.T;
  if (T == 0) throw ContractViolation("smc_run: need at least one target");
  const bool power = sched.kind == TemperingSchedule::Kind::power;
  if (power) {
    if (cfg.weights.mode != WeightMode::exact) throw Unsupported("power tempering needs exact weights");
    if (std::abs(sched.exponents.back() - 1.0) > 1e-12) throw ContractViolation("power schedule must end at 1");
    for (std::size_t t = 0; t < T; ++t)
      if (!(sched.exponents[t] > (t == 0 ? 0.0 : sched.exponents[t - 1])))
        throw ContractViolation("power exponents must increase from 0");
  } else if (n % T != 0) {
    throw ContractViolation("smc_run: unit count must be divisible by the number of targets");
  }
  if (cfg.weights.mode == WeightMode::exact && !HasExactLogZ<M>) throw Unsupported("exact weights need exact log Z");
  if (cfg.weights.mode == WeightMode::biased_bridge && (cfg.weights.M < 2 || cfg.weights.M % 2))
    throw ContractViolation("bridge weights need an even M >= 2");
  if (cfg.move.kind == MoveKind::exchange && power) throw Unsupported("exchange moves need data-point tempering");
  if (cfg.move.kind == MoveKind::perfect_posterior && power) throw Unsupported("perfect moves need data-point tempering");

  const std::size_t block = power ? n : n / T;
  const double log_p = std::log(static_cast<double>(P));

  SmcResult res;
  auto& rep = res.report;
  rep.estimator = std::string("smc-") + to_string(cfg.weights.mode);
  rep.seed = rng.seed();
  rep.particles = P;
  rep.bias = cfg.weights.mode == WeightMode::exact           ? BiasClass::exact
             : cfg.weights.mode == WeightMode::biased_bridge ? BiasClass::biased
                                                             : sim_bias(cfg.weights.sim);
  if (cfg.move.kind == MoveKind::exchange) rep.bias = combine(rep.bias, sim_bias(cfg.move.sim));

  std::vector<ParameterVector> theta(P);
  {
    RngStream init = rng.child(0);
    for (std::size_t p = 0; p < P; ++p) {
      RngStream r = init.child(p);
      theta[p] = model.sample_prior(r);
    }
  }
  std::vector<double> log_w(P, -log_p);
  std::vector<double> inc(P);
  std::vector<std::uint64_t> sweeps(P);
  std::vector<std::size_t> accepted(P);
  double log_z = 0.0;
  std::size_t collapsed_run = 0;

  for (std::size_t t = 1; t <= T; ++t) {
    const RngStream step = rng.child(t);
    const std::size_t b = power ? n : (t - 1) * block, e = power ? n : t * block;
    const double beta_prev = power ? (t == 1 ? 0.0 : sched.exponents[t - 2]) : 1.0;
    const double beta = power ? sched.exponents[t - 1] : 1.0;

    // Reweight.
    parallel_for(P, [&](std::size_t p) {
      RngStream r = step.child(2 * p);
      const auto& th = theta[p];
      sweeps[p] = 0;
      if (power) {
        if constexpr (HasExactLogZ<M>)
          inc[p] = (beta - beta_prev) * (model.log_gamma(y, th, n) - model.exact_log_z(th, n));
        return;
      }
      double lw = model.log_gamma(y, th, e) - (b == 0 ? 0.0 : model.log_gamma(y, th, b));
      switch (cfg.weights.mode) {
        case WeightMode::exact:
          if constexpr (HasExactLogZ<M>) lw += (b == 0 ? 0.0 : model.exact_log_z(th, b)) - model.exact_log_z(th, e);
          break;
        case WeightMode::unbiased_is: {
          const auto est = tempering_is_ratio(model, th, b, e, q_w, cfg.weights.M, cfg.weights.sim, r);
          lw += est.log_value;
          sweeps[p] = est.sweeps;
          break;
        }
        case WeightMode::biased_bridge: {
          const auto est = bridge_ratio(model, th, b, e, q_w, cfg.weights.M, cfg.weights.sim, r);
          lw += est.log_value;
          sweeps[p] = est.sweeps;
          break;
        }
      }
      inc[p] = lw;
    });
    std::vector<double> joint(P);
    for (std::size_t p = 0; p < P; ++p) {
      if (std::isnan(inc[p])) {
        std::ostringstream msg;
        msg << "smc_run: NaN incremental weight at t=" << t << " particle " << p << " theta=("
            << theta[p].transpose() << ")";
        throw NumericalAbort(msg.str());
      }
      joint[p] = log_w[p] + inc[p];
      rep.sweeps += sweeps[p];
    }
    const double step_log = log_sum_exp(joint);
    if (step_log == kNegInf) throw NumericalAbort("smc_run: every incremental weight is zero at t=" + std::to_string(t));
    log_z += step_log;
    normalise_log_weights(joint);
    log_w = joint;
    const double cur_ess = ess(log_w);
    collapsed_run = cur_ess < 1.0 + 1e-9 ? collapsed_run + 1 : 0;
    if (collapsed_run == 3) {
      ++rep.degeneracy_warnings;
      std::cerr << "warning: SMC weights degenerate (ESS = 1) for 3 consecutive targets ending at t=" << t << '\n';
    }

    // Proposal scales from the weighted cloud before resampling.
    Eigen::VectorXd scales;
    if (t == 1 && cfg.move.initial_scales) {
      scales = *cfg.move.initial_scales;
    } else {
      const auto mom = weighted_moments(theta, log_w);
      scales = mom.covariance.diagonal().cwiseMax(cfg.move.variance_floor).cwiseSqrt();
    }

    bool resampled = false;
    if (cfg.resampling.always || cur_ess < cfg.resampling.threshold * static_cast<double>(P)) {
      RngStream r = step.child(2 * P + 1);
      const auto idx = resample_indices(log_w, P, cfg.resampling.scheme, r);
      std::vector<ParameterVector> next(P);
      for (std::size_t p = 0; p < P; ++p) next[p] = theta[idx[p]];
      theta = std::move(next);
      std::fill(log_w.begin(), log_w.end(), -log_p);
      resampled = true;
    }

    // Move.
    std::size_t attempts = 0;
    if (cfg.move.kind != MoveKind::none) {
      const TemperedTarget<typename M::Data> target{&y, e};
      const KernelConfig kc{scales, cfg.move.sim};
      auto move_all = [&](const auto& log_target) {
        parallel_for(P, [&](std::size_t p) {
          RngStream r = step.child(2 * p + 1);
          accepted[p] = 0;
          std::uint64_t sw = 0;
          for (std::size_t s = 0; s < cfg.move.sweeps; ++s) {
            switch (cfg.move.kind) {
              case MoveKind::exchange: {
                auto st = exchange_step(theta[p], model, target, kc, r);
                theta[p] = std::move(st.theta);
                accepted[p] += st.accepted ? 1 : 0;
                sw += st.sweeps;
                break;
              }
              case MoveKind::single_site_mh:
                accepted[p] += single_site_mh_sweep(theta[p], log_target, scales, r);
                break;
              case MoveKind::perfect_posterior:
                theta[p] = perfect_posterior_draw(model, target, r);
                ++accepted[p];
                break;
              case MoveKind::none:
                break;
            }
          }
          sweeps[p] = sw;
        });
      };
      bool moved = false;
      if constexpr (HasFastLogTarget<M>) {
        if (!power && cfg.move.kind == MoveKind::single_site_mh) {
          move_all(model.make_log_target(y, e));
          moved = true;
        }
      }
      if (!moved) {
        if (cfg.move.kind == MoveKind::single_site_mh)
          move_all(detail::tempered_log_target(model, y, e, beta));
        else
          move_all([](const ParameterVector&) { return 0.0; });
      }
      const std::size_t per = cfg.move.kind == MoveKind::single_site_mh ? model.dim() : 1;
      attempts = P * cfg.move.sweeps * per;
    }
    std::size_t acc_total = 0;
    for (std::size_t p = 0; p < P; ++p) {
      acc_total += accepted[p];
      if (cfg.move.kind == MoveKind::exchange) rep.sweeps += sweeps[p];
    }
    res.trace.push_back({t, cur_ess, log_z,
                         attempts ? static_cast<double>(acc_total) / static_cast<double>(attempts) : 0.0, resampled});
  }
  rep.log_evidence = log_z;
  rep.ess = ess(log_w);
  res.particles = std::move(theta);
  res.log_weights = std::move(log_w);
  return res;
}

struct WeightIdentityResult {
  double log_generic = 0.0;
  double log_closed_form = 0.0;
  bool holds = false;
};

/// Incremental SMC weight for an accepted SAV move (theta_prev, u_prev) ->
/// (theta_new, u_new) at target t, evaluated from its generic definition
///   pi~_t(x_t) L_{t-1}(x_t, x_{t-1}) / (pi~_{t-1}(x_{t-1}) K_t(x_{t-1}, x_t))
/// with L the time reversal of K_t and pi~_t(theta, u) = p(theta) f_t(y|theta)
/// q_u(u|theta), compared with gamma_t(y|theta_prev)/gamma_{t-1}(y|theta_prev)
/// * Z_{t-1}(theta_prev)/Z_t(theta_prev). u lives on the first k units.
template <HasExactLogZ M, class LogQu>
WeightIdentityResult weight_identity_check(const M& model, const typename M::Data& y, std::size_t k_prev,
                                           std::size_t k, const ParameterVector& theta_prev,
                                           const typename M::Data& u_prev, const ParameterVector& theta_new,
                                           const typename M::Data& u_new, const Eigen::VectorXd& scales,
                                           const LogQu& log_qu, double tol = 1e-12) {
  auto log_f = [&](const ParameterVector& t, std::size_t units) {
    return model.log_gamma(y, t, units) - model.exact_log_z(t, units);
  };
  auto log_ext = [&](const ParameterVector& t, const typename M::Data& u, std::size_t units) {
    return model.log_prior(t) + log_f(t, units) + log_qu(u, t);
  };
  auto log_walk = [&](const ParameterVector& from, const ParameterVector& to) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < from.size(); ++i) {
      const double z = (to[i] - from[i]) / scales[i];
      s += -0.5 * z * z - std::log(scales[i]) - 0.5 * std::log(2.0 * std::numbers::pi);
    }
    return s;
  };
  // SAV acceptance for the move, gamma only.
  const double log_ratio = model.log_prior(theta_new) + model.log_gamma(y, theta_new, k) + log_qu(u_new, theta_new) +
                           model.log_gamma(u_prev, theta_prev, k) - model.log_prior(theta_prev) -
                           model.log_gamma(y, theta_prev, k) - log_qu(u_prev, theta_prev) -
                           model.log_gamma(u_new, theta_new, k);
  const double log_alpha = std::min(0.0, log_ratio);
  const double log_kernel = log_walk(theta_prev, theta_new) + model.log_gamma(u_new, theta_new, k) -
                            model.exact_log_z(theta_new, k) + log_alpha;
  const double log_backward = log_ext(theta_prev, u_prev, k) + log_kernel - log_ext(theta_new, u_new, k);

  WeightIdentityResult r;
  r.log_generic = log_ext(theta_new, u_new, k) + log_backward - log_ext(theta_prev, u_prev, k_prev) - log_kernel;
  r.log_closed_form = model.log_gamma(y, theta_prev, k) - model.log_gamma(y, theta_prev, k_prev) +
                      model.exact_log_z(theta_prev, k_prev) - model.exact_log_z(theta_prev, k);
  r.holds = std::abs(std::expm1(r.log_generic - r.log_closed_form)) <= tol;
  return r;
}

}  // namespace evd
