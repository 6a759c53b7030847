#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

#include "evd/core/moments.hpp"
#include "evd/core/parallel.hpp"
#include "evd/evidence/estimators.hpp"
#include "evd/harness/experiments.hpp"
#include "evd/models/ising.hpp"
#include "evd/smc/smc.hpp"
#include "evd/zratio/auxiliary.hpp"
#include "pilot.hpp"

namespace evd {

namespace {

Lattice draw_ising_data(const IsingModel& m, double theta, RngStream& rng) {
  const ParameterVector t = ParameterVector::Constant(static_cast<Eigen::Index>(m.dim()), theta);
  try {
    return m.simulate(t, m.sites(), rng, SimConfig::exact());
  } catch (const Unsupported&) {
    return m.simulate(t, m.sites(), rng, SimConfig::gibbs(2000));
  }
}

IsingOrder order_of(bool second) { return second ? IsingOrder::second : IsingOrder::first; }

}  // namespace

double ising_quadrature_log_evidence(std::size_t rows, std::size_t cols, double S1, double prior_lo,
                                     double prior_hi) {
  using boost::math::quadrature::gauss_kronrod;
  auto log_f = [&](double t) {
    return t * S1 - ising_exact_log_z(ParameterVector::Constant(1, t), rows, cols, IsingOrder::first);
  };
  // Shift by the likelihood at a coarse-grid maximum so the integrand is O(1).
  double ref = kNegInf;
  for (int i = 0; i <= 200; ++i) ref = std::max(ref, log_f(prior_lo + (prior_hi - prior_lo) * i / 200.0));
  const double density = 1.0 / (prior_hi - prior_lo);
  auto f = [&](double t) { return density * std::exp(log_f(t) - ref); };
  return std::log(gauss_kronrod<double, 61>::integrate(f, prior_lo, prior_hi, 15, 1e-13)) + ref;
}

IsingEvidenceResult run_ising_evidence(const IsingEvidenceParams& p) {
  if (p.runs == 0 || p.P == 0 || p.M == 0) throw ContractViolation("ising-evidence: budgets must be positive");
  const IsingModel m(p.rows, p.cols, order_of(p.second_order), p.prior_lo, p.prior_hi);
  const std::size_t k = m.sites();
  const RngStream root(p.seed);
  RngStream dr = root.child(0);
  const Lattice y = draw_ising_data(m, p.theta_true, dr);

  IsingEvidenceResult res;
  if (p.oracle && !p.second_order && p.cols <= kIsingMaxTransferCols) {
    res.truth = ising_quadrature_log_evidence(p.rows, p.cols, m.stats(y, k)[0], p.prior_lo, p.prior_hi);
    res.has_truth = true;
  }

  const ParameterVector theta0 =
      ParameterVector::Constant(static_cast<Eigen::Index>(m.dim()), p.prior_lo + 0.25 * (p.prior_hi - p.prior_lo));
  const auto design = harness_detail::pilot_design(m, y, theta0, p.pilot_steps, p.proposal_inflation,
                                                   SimConfig::gibbs(p.pilot_burn_in), p.pilot_scale, root.child(1));
  res.theta_hat = design.theta_hat[0];
  res.proposal_sd = std::sqrt(design.covariance(0, 0));
  res.pilot_sweeps = design.sweeps;

  RngStream zr = root.child(2);
  const auto z = smc_log_z(m, design.theta_hat, k, p.smc_particles, p.smc_targets, p.smc_resample_fraction, zr);
  res.log_z_hat = z.log_z;
  res.smc_sweeps = z.sweeps;
  if (p.oracle && p.cols <= kIsingMaxTransferCols) {
    res.log_z_hat_exact = m.exact_log_z(design.theta_hat, k);
    res.has_exact_log_z = true;
  }

  const ModelAux<IsingModel> qu(m, design.theta_hat, k, res.log_z_hat);
  const SimConfig sim = SimConfig::gibbs(p.B);
  res.runs.resize(p.runs);
  const RngStream runs = root.child(3);
  for (std::size_t r = 0; r < p.runs; ++r) {
    RngStream rr = runs.child(r);
    const auto rep = savis_log_evidence(m, y, design.proposal, p.P, p.M, qu, sim, rr);
    res.runs[r] = {r, rep.log_evidence, rep.ess, rep.sweeps};
  }

  // Paired budget-matched comparison of the two 1/Z estimators.
  const RngStream cmp = root.child(4);
  res.comparison.resize(p.compare_thetas);
  const AisPath path{p.compare_mavis_K, p.compare_mavis_M};
  parallel_for(p.compare_thetas, [&](std::size_t i) {
    RngStream r = cmp.child(i);
    ParameterVector th = design.proposal.sample(r);
    while (m.log_prior(th) == kNegInf) th = design.proposal.sample(r);
    std::vector<double> sav(p.compare_reps), mav(p.compare_reps);
    IsingComparisonRow row;
    row.theta = th[0];
    for (std::size_t j = 0; j < p.compare_reps; ++j) {
      RngStream a = r.child(1 + 2 * j), b = r.child(2 + 2 * j);
      const auto es = sav_inv_z(m, th, k, qu, p.compare_savis_M, sim, a);
      const auto em = mav_ratio(m, th, design.theta_hat, k, path, sim, b);
      sav[j] = es.log_value;
      mav[j] = em.log_value - res.log_z_hat;
      row.sweeps_savis = es.sweeps;
      row.sweeps_mavis = em.sweeps;
    }
    row.var_savis = variance(sav);
    row.var_mavis = variance(mav);
    res.comparison[i] = row;
  });
  return res;
}

IsingSmcResult run_ising_smc(const IsingSmcParams& p) {
  if (p.runs == 0) throw ContractViolation("ising-smc: runs must be positive");
  const IsingModel m(p.rows, p.cols, IsingOrder::first, p.prior_lo, p.prior_hi);
  const RngStream root(p.seed);
  RngStream dr = root.child(0);
  const Lattice y = draw_ising_data(m, p.theta_true, dr);
  IsingSmcResult res;
  res.truth = ising_quadrature_log_evidence(p.rows, p.cols, m.stats(y, m.sites())[0], p.prior_lo, p.prior_hi);

  SmcConfig cfg;
  cfg.P = p.P;
  cfg.schedule = TemperingSchedule::data_point(m.sites());
  cfg.weights = {WeightMode::unbiased_is, p.M, SimConfig::gibbs(p.B)};
  cfg.move.kind = MoveKind::exchange;
  cfg.move.sim = SimConfig::gibbs(p.move_B);
  cfg.resampling = {ResampleScheme::systematic, false, 0.5};
  const UniformSpinAux qw;
  res.runs.resize(p.runs);
  parallel_for(p.runs, [&](std::size_t r) {
    RngStream rr = root.child(1).child(r);
    const auto out = smc_run(m, y, cfg, rr, qw);
    res.runs[r] = {r, out.report.log_evidence, out.report.ess, out.report.sweeps};
  });
  return res;
}

}  // namespace evd
