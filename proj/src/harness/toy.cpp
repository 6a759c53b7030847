#include <cmath>

#include "evd/core/parallel.hpp"
#include "evd/evidence/estimators.hpp"
#include "evd/harness/experiments.hpp"
#include "evd/kernels/kernels.hpp"
#include "evd/models/count_models.hpp"
#include "pilot.hpp"

namespace evd {

namespace {

using harness_detail::pilot_design;

Counts draw_dataset(std::size_t n, RngStream& rng, bool& poisson) {
  poisson = rng.uniform() < 0.5;
  Counts y(n);
  if (poisson) {
    const double lambda = rng.exponential(1.0);
    for (auto& v : y) v = rng.poisson(lambda);
  } else {
    double p = rng.uniform();
    while (p <= 0.0) p = rng.uniform();
    for (auto& v : y) v = rng.geometric(p);
  }
  return y;
}

double count_mean(const Counts& y) {
  double s = 0.0;
  for (auto v : y) s += static_cast<double>(v);
  return s / static_cast<double>(y.size());
}

}  // namespace

ToyBfResult run_toy_bf(const ToyBfParams& p) {
  if (p.datasets == 0 || p.n == 0) throw ContractViolation("toy-bf: need datasets >= 1 and n >= 1");
  ToyBfResult res;
  std::vector<Counts> data(p.datasets);
  std::vector<double> prob(p.datasets);
  std::vector<bool> filled(p.datasets, false);
  std::size_t remaining = p.datasets;
  const double width = (p.prob_hi - p.prob_lo) / static_cast<double>(p.datasets);
  RngStream gen = RngStream(p.seed).child(0);
  for (std::size_t c = 0; c < p.max_candidates && remaining > 0; ++c) {
    RngStream r = gen.child(c);
    bool from_poisson = false;
    Counts y = draw_dataset(p.n, r, from_poisson);
    const double lbf = poisson_log_evidence(y) - geometric_log_evidence(y);
    const double pr = 1.0 / (1.0 + std::exp(-lbf));
    ++res.candidates;
    if (pr < p.prob_lo || pr >= p.prob_hi) continue;
    const auto bin = std::min(p.datasets - 1, static_cast<std::size_t>((pr - p.prob_lo) / width));
    if (filled[bin]) continue;
    filled[bin] = true;
    data[bin] = std::move(y);
    prob[bin] = pr;
    --remaining;
  }
  if (remaining > 0)
    throw NumericalAbort("toy-bf: " + std::to_string(remaining) + " probability bins still empty after " +
                         std::to_string(res.candidates) + " candidate datasets");

  PoissonModel pm;
  GeometricModel gm;
  res.rows.resize(p.datasets);
  const RngStream base = RngStream(p.seed).child(1);
  parallel_for(p.datasets, [&](std::size_t d) {
    const Counts& y = data[d];
    const RngStream r = base.child(d);
    ToyBfRow row;
    row.dataset = d;
    row.prob_poisson = prob[d];
    row.log_evidence_poisson = poisson_log_evidence(y);
    row.log_evidence_geometric = geometric_log_evidence(y);
    row.true_log_bf = row.log_evidence_poisson - row.log_evidence_geometric;

    const double ybar = count_mean(y);
    const auto dp = pilot_design(pm, y, ParameterVector::Constant(1, std::max(ybar, 0.01)), p.pilot_steps,
                                 p.proposal_inflation, SimConfig::exact(), 0.1, r.child(0));
    const auto dg = pilot_design(gm, y, ParameterVector::Constant(1, std::clamp(1.0 / (1.0 + ybar), 0.01, 0.99)),
                                 p.pilot_steps, p.proposal_inflation, SimConfig::exact(), 0.1, r.child(1));
    row.sweeps_pilot = dp.sweeps + dg.sweeps;

    const std::size_t n = y.size();
    const AisPath path{p.mavis_K, p.mavis_M};
    RngStream m1 = r.child(2), m2 = r.child(3);
    const auto mp = mavis_log_evidence(pm, y, dp.proposal, p.mavis_P, path, dp.theta_hat,
                                       pm.exact_log_z(dp.theta_hat, n), SimConfig::exact(), m1);
    const auto mg = mavis_log_evidence(gm, y, dg.proposal, p.mavis_P, path, dg.theta_hat,
                                       gm.exact_log_z(dg.theta_hat, n), SimConfig::exact(), m2);
    row.mavis_poisson = mp.log_evidence;
    row.mavis_geometric = mg.log_evidence;
    row.mavis = log_bayes_factor(mp, mg).log_value;
    row.sweeps_mavis = mp.sweeps + mg.sweeps;

    RngStream s1 = r.child(4), s2 = r.child(5);
    const auto sp = sl_is_log_marginal(pm, y, dp.proposal, p.sl_P, SlConfig{p.sl_M}, SimConfig::exact(), s1);
    const auto sg = sl_is_log_marginal(gm, y, dg.proposal, p.sl_P, SlConfig{p.sl_M}, SimConfig::exact(), s2);
    row.sl = log_bayes_factor(sp, sg).log_value;
    row.sl_singular = sp.singular + sg.singular;
    row.sweeps_sl = sp.sweeps + sg.sweeps;

    RngStream a1 = r.child(6), a2 = r.child(7);
    const AbcConfig abc{p.abc_epsilon, p.abc_R};
    const auto ap = abc_is_log_marginal(pm, y, dp.proposal, p.abc_P, abc, SimConfig::exact(), a1);
    const auto ag = abc_is_log_marginal(gm, y, dg.proposal, p.abc_P, abc, SimConfig::exact(), a2);
    row.abc = log_bayes_factor(ap, ag).log_value;
    row.sweeps_abc = ap.sweeps + ag.sweeps;
    res.rows[d] = row;
  });
  return res;
}

}  // namespace evd
