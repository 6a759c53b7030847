#include <filesystem>
#include <fstream>

#include "evd/harness/experiments.hpp"
#include "evd/harness/summary.hpp"

namespace evd {

namespace {

using U64 = std::uint64_t;

U64 u64(std::size_t v) { return static_cast<U64>(v); }

std::uint32_t burn_in(const ExperimentConfig& c, const std::string& key, std::uint32_t fallback) {
  const auto v = c.get<long long>(key, fallback);
  if (v < 0) throw ConfigError("config: " + key + " must be >= 0");
  return static_cast<std::uint32_t>(v);
}

CsvTable replicate_table() { return CsvTable({"replicate", "estimator", "estimate", "oracle", "ess", "sweeps"}); }

void add_summary(ExperimentOutput& out, const CsvTable& reps) {
  std::string notice;
  const auto rows = estimate_rows(reps, &notice);
  bool missing = false;
  for (const auto& r : rows) missing = missing || !r.oracle;
  if (missing && notice.empty()) notice = "oracle unavailable for some rows: bias and MSE omitted for those groups";
  if (!notice.empty()) out.notices.push_back(notice);
  out.tables.emplace_back("summary.csv", summary_table(summarise(rows)));
}

CsvTable budget_table() { return CsvTable({"estimator", "sweeps", "formula"}); }

ExperimentOutput toy(const ExperimentConfig& c) {
  ToyBfParams p;
  p.datasets = c.replicates;
  p.seed = c.seed;
  p.n = c.positive("data.n", p.n);
  p.prob_lo = c.get("data.prob_lo", p.prob_lo);
  p.prob_hi = c.get("data.prob_hi", p.prob_hi);
  if (!(0.0 <= p.prob_lo && p.prob_lo < p.prob_hi && p.prob_hi <= 1.0))
    throw ConfigError("config: need 0 <= data.prob_lo < data.prob_hi <= 1");
  p.max_candidates = c.positive("data.max_candidates", p.max_candidates);
  p.pilot_steps = c.positive("pilot.steps", p.pilot_steps);
  p.proposal_inflation = c.positive_real("pilot.inflation", p.proposal_inflation);
  p.mavis_P = c.positive("mavis.P", p.mavis_P);
  p.mavis_K = c.positive("mavis.K", p.mavis_K);
  p.mavis_M = c.positive("mavis.M", p.mavis_M);
  p.sl_P = c.positive("sl.P", p.sl_P);
  p.sl_M = c.positive("sl.M", p.sl_M);
  p.abc_P = c.positive("abc.P", p.abc_P);
  p.abc_R = c.positive("abc.R", p.abc_R);
  p.abc_epsilon = c.positive_real("abc.epsilon", p.abc_epsilon);
  const auto res = run_toy_bf(p);

  ExperimentOutput out;
  CsvTable data({"dataset", "prob_poisson", "true_log_bf", "mavis", "sl", "abc", "log_evidence_poisson",
                 "log_evidence_geometric", "mavis_poisson", "mavis_geometric", "sl_singular"});
  CsvTable reps = replicate_table();
  U64 sm = 0, ss = 0, sa = 0, sp = 0;
  for (const auto& r : res.rows) {
    data.add_row() << u64(r.dataset) << r.prob_poisson << r.true_log_bf << r.mavis << r.sl << r.abc
                   << r.log_evidence_poisson << r.log_evidence_geometric << r.mavis_poisson << r.mavis_geometric
                   << u64(r.sl_singular);
    reps.add_row() << u64(r.dataset) << "mavis" << r.mavis << r.true_log_bf << "" << r.sweeps_mavis;
    reps.add_row() << u64(r.dataset) << "sl-is" << r.sl << r.true_log_bf << "" << r.sweeps_sl;
    reps.add_row() << u64(r.dataset) << "abc-is" << r.abc << r.true_log_bf << "" << r.sweeps_abc;
    sm += r.sweeps_mavis;
    ss += r.sweeps_sl;
    sa += r.sweeps_abc;
    sp += r.sweeps_pilot;
  }
  // Upper bounds: proposals outside the prior support cost nothing.
  CsvTable budget = budget_table();
  const U64 D = u64(res.rows.size());
  budget.add_row() << "mavis" << sm << D * 2 * u64(p.mavis_P * p.mavis_M * (p.mavis_K + 1));
  budget.add_row() << "sl-is" << ss << D * 2 * u64(p.sl_P * p.sl_M);
  budget.add_row() << "abc-is" << sa << D * 2 * u64(p.abc_P * p.abc_R);
  budget.add_row() << "pilot" << sp << D * 2 * u64(p.pilot_steps + std::max<std::size_t>(p.pilot_steps / 4, 1));
  out.tables.emplace_back("datasets.csv", data);
  out.tables.emplace_back("replicates.csv", reps);
  out.tables.emplace_back("budget.csv", budget);
  add_summary(out, reps);
  out.notices.push_back("candidate datasets drawn: " + std::to_string(res.candidates));
  return out;
}

ExperimentOutput ising_evidence(const ExperimentConfig& c) {
  IsingEvidenceParams p;
  p.runs = c.replicates;
  p.seed = c.seed;
  p.rows = c.positive("model.rows", p.rows);
  p.cols = c.positive("model.cols", p.cols);
  const auto order = c.get<std::string>("model.order", "first");
  if (order != "first" && order != "second") throw ConfigError("config: model.order must be first or second");
  p.second_order = order == "second";
  p.theta_true = c.get("model.theta", p.theta_true);
  p.prior_lo = c.get("model.prior_lo", p.prior_lo);
  p.prior_hi = c.get("model.prior_hi", p.prior_hi);
  if (!(p.prior_lo < p.prior_hi)) throw ConfigError("config: need model.prior_lo < model.prior_hi");
  p.pilot_steps = c.positive("pilot.steps", p.pilot_steps);
  p.pilot_burn_in = burn_in(c, "pilot.B", p.pilot_burn_in);
  p.pilot_scale = c.positive_real("pilot.scale", p.pilot_scale);
  p.proposal_inflation = c.positive_real("pilot.inflation", p.proposal_inflation);
  p.smc_particles = c.positive("zhat.particles", p.smc_particles);
  p.smc_targets = c.positive("zhat.targets", p.smc_targets);
  p.P = c.positive("savis.P", p.P);
  p.M = c.positive("savis.M", p.M);
  p.B = burn_in(c, "savis.B", p.B);
  p.compare_thetas = c.get<std::size_t>("compare.thetas", p.compare_thetas);
  p.compare_reps = c.positive("compare.reps", p.compare_reps);
  p.compare_savis_M = c.positive("compare.savis_M", p.compare_savis_M);
  p.compare_mavis_M = c.positive("compare.mavis_M", p.compare_mavis_M);
  p.compare_mavis_K = c.positive("compare.mavis_K", p.compare_mavis_K);
  p.oracle = c.get("model.oracle", p.oracle);
  const auto res = run_ising_evidence(p);

  ExperimentOutput out;
  CsvTable reps = replicate_table();
  for (const auto& r : res.runs) {
    auto row = reps.add_row();
    row << u64(r.run) << "savis" << r.log_evidence;
    if (res.has_truth)
      row << res.truth;
    else
      row << "nan";
    row << r.ess << r.sweeps;
  }
  CsvTable design({"theta_hat", "proposal_sd", "log_z_hat", "log_z_hat_exact", "truth", "pilot_sweeps", "smc_sweeps"});
  design.add_row() << res.theta_hat << res.proposal_sd << res.log_z_hat
                   << (res.has_exact_log_z ? format_double(res.log_z_hat_exact) : "nan")
                   << (res.has_truth ? format_double(res.truth) : "nan") << res.pilot_sweeps << res.smc_sweeps;
  CsvTable cmp({"theta", "var_savis", "var_mavis", "sweeps_savis", "sweeps_mavis"});
  for (const auto& r : res.comparison)
    cmp.add_row() << r.theta << r.var_savis << r.var_mavis << r.sweeps_savis << r.sweeps_mavis;
  out.tables.emplace_back("design.csv", design);
  out.tables.emplace_back("replicates.csv", reps);
  out.tables.emplace_back("comparison.csv", cmp);
  add_summary(out, reps);
  return out;
}

ExperimentOutput ising_smc(const ExperimentConfig& c) {
  IsingSmcParams p;
  p.runs = c.replicates;
  p.seed = c.seed;
  p.rows = c.positive("model.rows", p.rows);
  p.cols = c.positive("model.cols", p.cols);
  p.theta_true = c.get("model.theta", p.theta_true);
  p.prior_lo = c.get("model.prior_lo", p.prior_lo);
  p.prior_hi = c.get("model.prior_hi", p.prior_hi);
  p.P = c.positive("smc.P", p.P);
  p.M = c.positive("smc.M", p.M);
  p.B = burn_in(c, "smc.B", p.B);
  p.move_B = burn_in(c, "smc.move_B", p.move_B);
  const auto res = run_ising_smc(p);
  ExperimentOutput out;
  CsvTable reps = replicate_table();
  for (const auto& r : res.runs)
    reps.add_row() << u64(r.run) << "smc-unbiased-is" << r.log_evidence << res.truth << r.ess << r.sweeps;
  out.tables.emplace_back("replicates.csv", reps);
  add_summary(out, reps);
  return out;
}

ExperimentOutput precision_smc(const ExperimentConfig& c) {
  PrecisionSmcParams p;
  p.runs = c.replicates;
  p.seed = c.seed;
  p.d = c.positive("model.d", p.d);
  p.n = c.positive("model.n", p.n);
  p.data_variance = c.positive_real("model.data_variance", p.data_variance);
  p.P = c.positive("smc.P", p.P);
  p.M = c.positive("smc.M", p.M);
  p.sweeps = c.positive("smc.sweeps", p.sweeps);
  p.resample_threshold = c.get("smc.resample_threshold", p.resample_threshold);
  p.weights = c.get<std::string>("smc.weights", p.weights);
  p.move = c.get<std::string>("smc.move", p.move);
  PrecisionSmcResult res;
  try {
    res = run_precision_smc(p);
  } catch (const ContractViolation& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  ExperimentOutput out;
  CsvTable reps({"replicate", "estimator", "estimate", "oracle", "ess", "sweeps", "resamples"});
  for (std::size_t i = 0; i < res.runs.size(); ++i) {
    const auto& r = res.runs[i];
    reps.add_row() << u64(r.run) << res.estimator << r.log_evidence << res.truth << r.ess << r.sweeps
                   << u64(res.resamples[i]);
  }
  CsvTable budget = budget_table();
  U64 total = 0;
  for (const auto& r : res.runs) total += r.sweeps;
  const bool random = p.weights != "exact";
  budget.add_row() << res.estimator << total << (random ? u64(res.runs.size() * p.n * p.P * p.M) : U64{0});
  out.tables.emplace_back("replicates.csv", reps);
  out.tables.emplace_back("budget.csv", budget);
  add_summary(out, reps);
  return out;
}

ExperimentOutput bias_accumulation(const ExperimentConfig& c) {
  BiasAccumulationParams p;
  p.replicates = c.replicates;
  p.seed = c.seed;
  p.n = c.positive("model.n", p.n);
  p.data_variance = c.positive_real("model.data_variance", p.data_variance);
  p.P = c.positive("smc.P", p.P);
  p.M = c.positive("smc.M", p.M);
  const auto res = run_bias_accumulation(p);
  ExperimentOutput out;
  CsvTable curves({"sampler", "t", "oracle", "bias", "se", "mse"});
  CsvTable reps = replicate_table();
  CsvTable budget = budget_table();
  for (const auto& c2 : res.curves) {
    for (std::size_t t = 0; t < c2.bias.size(); ++t)
      curves.add_row() << c2.sampler << u64(t + 1) << res.oracle[t] << c2.bias[t] << c2.se[t] << c2.mse[t];
    for (std::size_t r = 0; r < c2.final_estimates.size(); ++r)
      reps.add_row() << u64(r) << c2.sampler << c2.final_estimates[r] << res.oracle.back() << "" << "";
    const U64 per = c2.sampler == std::string("exact") ? 0 : u64(p.n * p.P * p.M);
    budget.add_row() << c2.sampler << c2.sweeps << per * u64(p.replicates);
  }
  out.tables.emplace_back("curves.csv", curves);
  out.tables.emplace_back("replicates.csv", reps);
  out.tables.emplace_back("budget.csv", budget);
  add_summary(out, reps);
  return out;
}

ExperimentOutput prop1(const ExperimentConfig& c) {
  Prop1SweepParams p;
  p.instances = c.replicates;
  p.seed = c.seed;
  auto& g = p.generator;
  g.states = c.positive("generator.states", g.states);
  g.horizon = c.positive("generator.horizon", g.horizon);
  g.alpha_lo = c.get("generator.alpha_lo", g.alpha_lo);
  g.alpha_hi = c.get("generator.alpha_hi", g.alpha_hi);
  g.log_potential_band = c.get("generator.log_potential_band", g.log_potential_band);
  g.gamma_lo = c.get("generator.gamma_lo", g.gamma_lo);
  g.gamma_hi = c.get("generator.gamma_hi", g.gamma_hi);
  const auto res = run_prop1_sweep(p);
  ExperimentOutput out;
  out.tables.emplace_back("prop1.csv", prop1_table(res, g));
  return out;
}

ExperimentOutput ergm(const ExperimentConfig& c) {
  ErgmSyntheticParams p;
  p.nodes = c.positive("model.nodes", p.nodes);
  p.theta_edges = c.get("model.theta_edges", p.theta_edges);
  p.pilot_steps = c.positive("pilot.steps", p.pilot_steps);
  p.B = burn_in(c, "sim.B", p.B);
  p.P = c.positive("is.P", p.P);
  p.sl_M = c.positive("sl.M", p.sl_M);
  p.mavis_K = c.positive("mavis.K", p.mavis_K);
  p.mavis_M = c.positive("mavis.M", p.mavis_M);
  p.smc_particles = c.positive("zhat.particles", p.smc_particles);
  p.smc_targets = c.positive("zhat.targets", p.smc_targets);
  ExperimentOutput out;
  CsvTable reps = replicate_table();
  CsvTable detail({"replicate", "log_bf_sl", "log_bf_mavis", "mavis_edges", "mavis_two_star", "edges_exact"});
  for (std::size_t r = 0; r < c.replicates; ++r) {
    p.seed = RngStream(c.seed).child(r).key();
    const auto res = run_ergm_synthetic(p);
    reps.add_row() << u64(r) << "sl-is" << res.log_bf_sl << "nan" << "" << res.sweeps_sl;
    reps.add_row() << u64(r) << "mavis" << res.log_bf_mavis << "nan" << "" << res.sweeps_mavis;
    detail.add_row() << u64(r) << res.log_bf_sl << res.log_bf_mavis << res.log_evidence_mavis_edges
                     << res.log_evidence_mavis_two_star << res.log_evidence_edges_exact;
  }
  out.tables.emplace_back("replicates.csv", reps);
  out.tables.emplace_back("ergm.csv", detail);
  add_summary(out, reps);
  return out;
}

}  // namespace

CsvTable prop1_table(const Prop1SweepResult& res, const FlowGenerator& g) {
  CsvTable t({"instance", "n", "T", "gamma_rel", "eps_M", "eps_G", "sup_tv", "bound", "margin", "lemma_margin",
              "holds"});
  for (const auto& r : res.rows)
    t.add_row() << u64(r.instance) << u64(g.states) << u64(g.horizon) << r.gamma_rel << r.eps_M << r.eps_G
                << r.sup_tv << r.bound << r.margin << r.lemma_margin << r.holds;
  return t;
}

ExperimentOutput run_experiment(const ExperimentConfig& cfg) {
  ExperimentOutput out;
  if (cfg.id == "toy-bf") out = toy(cfg);
  else if (cfg.id == "ising-evidence") out = ising_evidence(cfg);
  else if (cfg.id == "ising-smc") out = ising_smc(cfg);
  else if (cfg.id == "precision-smc") out = precision_smc(cfg);
  else if (cfg.id == "bias-accumulation") out = bias_accumulation(cfg);
  else if (cfg.id == "prop1-sweep") out = prop1(cfg);
  else if (cfg.id == "ergm-synthetic") out = ergm(cfg);
  else throw ConfigError("config: unknown experiment '" + cfg.id + "'");
  out.id = cfg.id;
  return out;
}

void write_experiment(const ExperimentConfig& cfg, const ExperimentOutput& out, const std::string& config_text) {
  namespace fs = std::filesystem;
  fs::create_directories(cfg.output);
  for (const auto& [name, table] : out.tables) table.write((fs::path(cfg.output) / name).string());
  std::ofstream f(fs::path(cfg.output) / "config.ini", std::ios::binary);
  f << "; config hash " << cfg.hash << "\n" << config_text;
}

}  // namespace evd
