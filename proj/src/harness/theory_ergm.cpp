#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

#include "evd/core/parallel.hpp"
#include "evd/evidence/estimators.hpp"
#include "evd/harness/experiments.hpp"
#include "evd/models/ergm.hpp"
#include "pilot.hpp"

namespace evd {

Prop1SweepResult run_prop1_sweep(const Prop1SweepParams& p) {
  if (p.instances == 0) throw ContractViolation("prop1-sweep: instances must be positive");
  Prop1SweepResult res;
  res.rows.resize(p.instances);
  const RngStream root(p.seed);
  parallel_for(p.instances, [&](std::size_t i) {
    RngStream r = root.child(i);
    const auto flow = random_flow(p.generator, r);
    flow.validate();
    const auto pr = prop1_check(flow);
    const auto paths = flow_evolve(flow);
    double lemma = INFINITY;
    bool lemma_ok = true;
    for (std::size_t t = 0; t < flow.horizon(); ++t) {
      for (const auto* eta : {&paths.exact[t], &paths.approx[t]}) {
        const auto l = lemma1_check(*eta, flow.potentials[t], flow.approx_potentials[t]);
        lemma = std::min(lemma, l.margin);
        lemma_ok = lemma_ok && l.holds;
      }
    }
    Prop1Row row;
    row.instance = i;
    row.gamma_rel = pr.constants.gamma_rel;
    row.eps_M = pr.constants.eps_M;
    row.eps_G = pr.constants.eps_G;
    row.sup_tv = pr.sup_tv;
    row.bound = pr.bound;
    row.margin = pr.margin;
    row.lemma_margin = lemma;
    row.holds = pr.holds && lemma_ok;
    res.rows[i] = row;
  });
  res.min_margin = res.min_lemma_margin = INFINITY;
  for (const auto& row : res.rows) {
    res.holding += row.holds ? 1 : 0;
    res.min_margin = std::min(res.min_margin, row.margin);
    res.min_lemma_margin = std::min(res.min_lemma_margin, row.lemma_margin);
  }
  return res;
}

namespace {

// Both ERGMs summarised by (edges, two-stars) so that their SL marginals
// refer to the same statistic.
class SharedSummaryErgm : public ErgmModel {
 public:
  using ErgmModel::ErgmModel;
  SummaryVector summary(const Graph& g) const { return ergm_stats(g, ErgmStats::edges_two_stars); }
};

// Edges-only evidence: dyads are i.i.d. Bernoulli(logistic(theta)) given theta.
double edges_log_evidence(double edges, double dyads, double prior_var) {
  using boost::math::quadrature::gauss_kronrod;
  auto log_f = [&](double t) {
    const double lz = t > 0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
    return t * edges - dyads * lz - 0.5 * t * t / prior_var - 0.5 * std::log(2.0 * M_PI * prior_var);
  };
  const double sd = std::sqrt(prior_var);
  double ref = kNegInf;
  for (int i = -2000; i <= 2000; ++i) ref = std::max(ref, log_f(i * 10.0 * sd / 2000.0));
  auto f = [&](double t) { return std::exp(log_f(t) - ref); };
  return std::log(gauss_kronrod<double, 61>::integrate(f, -10.0 * sd, 10.0 * sd, 15, 1e-13)) + ref;
}

}  // namespace

ErgmSyntheticResult run_ergm_synthetic(const ErgmSyntheticParams& p) {
  const SharedSummaryErgm m1(p.nodes, ErgmStats::edges), m2(p.nodes, ErgmStats::edges_two_stars);
  const RngStream root(p.seed);
  RngStream dr = root.child(0);
  const Graph y = m1.simulate(ParameterVector::Constant(1, p.theta_edges), 1, dr, SimConfig::exact());
  ErgmSyntheticResult res;
  const double E = ergm_stats(y, ErgmStats::edges)[0];
  res.log_evidence_edges_exact = edges_log_evidence(E, static_cast<double>(y.dyads()), 25.0);

  const SimConfig sim = SimConfig::gibbs(p.B);
  const double density = std::clamp(E / static_cast<double>(y.dyads()), 0.01, 0.99);
  const double logit = std::log(density / (1.0 - density));
  const auto d1 = harness_detail::pilot_design(m1, y, ParameterVector::Constant(1, logit), p.pilot_steps, 1.0, sim,
                                               0.1, root.child(1));
  ParameterVector start2(2);
  start2 << logit, 0.0;
  const auto d2 = harness_detail::pilot_design(m2, y, start2, p.pilot_steps, 1.0, sim, 0.05, root.child(2));

  RngStream zr = root.child(3);
  const double lz1 = m1.exact_log_z(d1.theta_hat, 1);
  const double lz2 = smc_log_z(m2, d2.theta_hat, 1, p.smc_particles, p.smc_targets, 0.5, zr).log_z;

  const AisPath path{p.mavis_K, p.mavis_M};
  RngStream a = root.child(4), b = root.child(5);
  const auto r1 = mavis_log_evidence(m1, y, d1.proposal, p.P, path, d1.theta_hat, lz1, sim, a);
  const auto r2 = mavis_log_evidence(m2, y, d2.proposal, p.P, path, d2.theta_hat, lz2, sim, b);
  res.log_evidence_mavis_edges = r1.log_evidence;
  res.log_evidence_mavis_two_star = r2.log_evidence;
  res.log_bf_mavis = log_bayes_factor(r1, r2).log_value;
  res.sweeps_mavis = r1.sweeps + r2.sweeps;

  RngStream c = root.child(6), d = root.child(7);
  const auto s1 = sl_is_log_marginal(m1, y, d1.proposal, p.P, SlConfig{p.sl_M}, sim, c);
  const auto s2 = sl_is_log_marginal(m2, y, d2.proposal, p.P, SlConfig{p.sl_M}, sim, d);
  res.log_bf_sl = log_bayes_factor(s1, s2).log_value;
  res.sweeps_sl = s1.sweeps + s2.sweeps;
  return res;
}

}  // namespace evd
