#include <cmath>

#include "evd/core/parallel.hpp"
#include "evd/harness/experiments.hpp"
#include "evd/models/precision.hpp"
#include "evd/smc/smc.hpp"

namespace evd {

namespace {

Vectors draw_gaussian_data(std::size_t d, std::size_t n, double var, RngStream& rng) {
  Vectors y(n, Eigen::VectorXd(d));
  const double sd = std::sqrt(var);
  for (auto& v : y)
    for (std::size_t j = 0; j < d; ++j) v[static_cast<Eigen::Index>(j)] = sd * rng.normal();
  return y;
}

}  // namespace

PrecisionSmcResult run_precision_smc(const PrecisionSmcParams& p) {
  if (p.runs == 0 || p.P == 0 || p.M == 0) throw ContractViolation("precision-smc: budgets must be positive");
  const RngStream root(p.seed);
  RngStream dr = root.child(0);
  const Vectors y = draw_gaussian_data(p.d, p.n, p.data_variance, dr);
  const GaussianPrecisionModel m(p.d);
  PrecisionSmcResult res;
  res.truth = gaussian_precision_log_evidence(y, m.nu(), m.V());

  SmcConfig cfg;
  cfg.P = p.P;
  cfg.schedule = TemperingSchedule::data_point(p.n);
  cfg.weights = {parse_weight_mode(p.weights), p.M, SimConfig::exact()};
  cfg.move.kind = parse_move_kind(p.move);
  cfg.move.sweeps = p.sweeps;
  res.estimator = std::string("smc-") + p.weights;
  cfg.resampling = {ResampleScheme::systematic, false, p.resample_threshold};
  const GaussianUnitAux qw(precision_mle(y));
  res.runs.resize(p.runs);
  res.resamples.resize(p.runs);
  for (std::size_t r = 0; r < p.runs; ++r) {
    RngStream rr = root.child(1).child(r);
    const auto out = smc_run(m, y, cfg, rr, qw);
    res.runs[r] = {r, out.report.log_evidence, out.report.ess, out.report.sweeps};
    for (const auto& row : out.trace) res.resamples[r] += row.resampled ? 1 : 0;
  }
  return res;
}

BiasAccumulationResult run_bias_accumulation(const BiasAccumulationParams& p) {
  if (p.replicates == 0 || p.P == 0 || p.n == 0) throw ContractViolation("bias-accumulation: budgets must be positive");
  const RngStream root(p.seed);
  RngStream dr = root.child(0);
  const Vectors y = draw_gaussian_data(1, p.n, p.data_variance, dr);
  const GaussianPrecisionModel m(1);
  BiasAccumulationResult res;
  res.oracle.resize(p.n);
  for (std::size_t t = 1; t <= p.n; ++t)
    res.oracle[t - 1] = gaussian_precision_log_evidence(Vectors(y.begin(), y.begin() + static_cast<long>(t)), m.nu(), m.V());

  struct Sampler {
    const char* name;
    WeightMode mode;
    MoveKind move;
  };
  const Sampler samplers[] = {{"exact", WeightMode::exact, MoveKind::single_site_mh},
                              {"unbiased-is", WeightMode::unbiased_is, MoveKind::single_site_mh},
                              {"bridge-mcmc", WeightMode::biased_bridge, MoveKind::single_site_mh},
                              {"bridge-perfect", WeightMode::biased_bridge, MoveKind::perfect_posterior}};
  const GaussianUnitAux qw(precision_mle(y));
  for (std::size_t s = 0; s < 4; ++s) {
    SmcConfig cfg;
    cfg.P = p.P;
    cfg.schedule = TemperingSchedule::data_point(p.n);
    cfg.weights = {samplers[s].mode, p.M, SimConfig::exact()};
    cfg.move.kind = samplers[s].move;
    cfg.resampling = {ResampleScheme::systematic, false, 0.5};
    std::vector<std::vector<double>> traces(p.replicates);
    std::vector<std::uint64_t> sweeps(p.replicates);
    parallel_for(p.replicates, [&](std::size_t r) {
      RngStream rr = root.child(1 + s).child(r);
      const auto out = smc_run(m, y, cfg, rr, qw);
      traces[r].reserve(p.n);
      for (const auto& row : out.trace) traces[r].push_back(row.log_evidence);
      sweeps[r] = out.report.sweeps;
    });
    BiasCurve c;
    c.sampler = samplers[s].name;
    const double R = static_cast<double>(p.replicates);
    for (std::size_t t = 0; t < p.n; ++t) {
      double sum = 0.0, sq = 0.0;
      for (std::size_t r = 0; r < p.replicates; ++r) {
        const double e = traces[r][t] - res.oracle[t];
        sum += e;
        sq += e * e;
      }
      const double mu = sum / R;
      const double var = p.replicates > 1 ? (sq - R * mu * mu) / (R - 1.0) : 0.0;
      c.bias.push_back(mu);
      c.mse.push_back(sq / R);
      c.se.push_back(std::sqrt(std::max(var, 0.0) / R));
    }
    for (std::size_t r = 0; r < p.replicates; ++r) {
      c.final_estimates.push_back(traces[r].back());
      c.sweeps += sweeps[r];
    }
    res.curves.push_back(std::move(c));
  }
  return res;
}

}  // namespace evd
