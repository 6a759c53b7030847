#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "evd/core/types.hpp"
#include "evd/harness/config.hpp"
#include "evd/harness/csv.hpp"
#include "evd/theory/flow.hpp"

namespace evd {

// ------------------------------------------------------------ toy-bf

struct ToyBfParams {
  std::size_t datasets = 100;
  std::size_t n = 100;
  double prob_lo = 0.01, prob_hi = 0.99;
  std::size_t max_candidates = 5'000'000;
  std::size_t pilot_steps = 2000;
  double proposal_inflation = 2.0;
  std::size_t mavis_P = 100, mavis_K = 1000, mavis_M = 1;
  std::size_t sl_P = 1000, sl_M = 100;
  std::size_t abc_P = 1000, abc_R = 100;
  double abc_epsilon = 0.1;
  std::uint64_t seed = 1;
};

struct ToyBfRow {
  std::size_t dataset = 0;
  /// Posterior probability of the Poisson model under equal model priors.
  double prob_poisson = 0.0;
  double true_log_bf = 0.0;
  double mavis = 0.0, sl = 0.0, abc = 0.0;
  double log_evidence_poisson = 0.0, log_evidence_geometric = 0.0;
  double mavis_poisson = 0.0, mavis_geometric = 0.0;
  std::uint64_t sweeps_mavis = 0, sweeps_sl = 0, sweeps_abc = 0, sweeps_pilot = 0;
  std::size_t sl_singular = 0;
};

struct ToyBfResult {
  std::vector<ToyBfRow> rows;
  std::size_t candidates = 0;
};

/// Datasets fill equal-width bins of the Poisson posterior probability over
/// [prob_lo, prob_hi]; each is scored by MAVIS, SL-IS and ABC-IS.
ToyBfResult run_toy_bf(const ToyBfParams& p);

// ------------------------------------------------------------ ising-evidence

struct IsingEvidenceParams {
  std::size_t rows = 10, cols = 10;
  bool second_order = false;
  double theta_true = 0.3;
  double prior_lo = 0.0, prior_hi = 2.0;
  std::size_t pilot_steps = 10000;
  std::uint32_t pilot_burn_in = 20;
  double pilot_scale = 0.1;
  std::size_t smc_particles = 200, smc_targets = 100;
  double smc_resample_fraction = 0.5;
  double proposal_inflation = 1.0;
  std::size_t runs = 20;
  std::size_t P = 1000, M = 100;
  std::uint32_t B = 20;
  /// SAVIS against MAVIS at a matched budget on thetas drawn from the proposal.
  std::size_t compare_thetas = 20, compare_reps = 30;
  std::size_t compare_savis_M = 100, compare_mavis_M = 20, compare_mavis_K = 84;
  /// Quadrature truth needs cols <= 20 and is skipped for larger lattices.
  bool oracle = true;
  std::uint64_t seed = 1;
};

struct IsingEvidenceRun {
  std::size_t run = 0;
  double log_evidence = 0.0;
  double ess = 0.0;
  std::uint64_t sweeps = 0;
};

struct IsingComparisonRow {
  double theta = 0.0;
  double var_savis = 0.0, var_mavis = 0.0;
  std::uint64_t sweeps_savis = 0, sweeps_mavis = 0;
};

struct IsingEvidenceResult {
  double truth = 0.0;
  bool has_truth = false;
  double theta_hat = 0.0, proposal_sd = 0.0;
  double log_z_hat = 0.0, log_z_hat_exact = 0.0;
  bool has_exact_log_z = false;
  std::uint64_t pilot_sweeps = 0, smc_sweeps = 0;
  std::vector<IsingEvidenceRun> runs;
  std::vector<IsingComparisonRow> comparison;
};

IsingEvidenceResult run_ising_evidence(const IsingEvidenceParams& p);

/// log p(y) for a first-order Ising model with a uniform prior, by adaptive
/// Gauss-Kronrod quadrature of the exact likelihood.
double ising_quadrature_log_evidence(std::size_t rows, std::size_t cols, double S1, double prior_lo, double prior_hi);

// ------------------------------------------------------------ ising-smc

struct IsingSmcParams {
  std::size_t rows = 10, cols = 10;
  double theta_true = 0.3;
  double prior_lo = 0.0, prior_hi = 2.0;
  std::size_t P = 500, M = 20;
  std::uint32_t B = 10, move_B = 10;
  std::size_t runs = 5;
  std::uint64_t seed = 1;
};

struct IsingSmcResult {
  double truth = 0.0;
  std::vector<IsingEvidenceRun> runs;
};

IsingSmcResult run_ising_smc(const IsingSmcParams& p);

// ------------------------------------------------------------ precision-smc

struct PrecisionSmcParams {
  std::size_t d = 10, n = 30;
  double data_variance = 0.1;
  std::size_t P = 2000, M = 200;
  std::size_t sweeps = 1;
  double resample_threshold = 0.5;
  /// "exact", "unbiased-is" or "biased-bridge"; "mh" or "perfect" moves.
  std::string weights = "unbiased-is", move = "mh";
  std::size_t runs = 10;
  std::uint64_t seed = 1;
};

struct PrecisionSmcResult {
  std::string estimator;
  double truth = 0.0;
  std::vector<IsingEvidenceRun> runs;
  std::vector<std::size_t> resamples;
};

PrecisionSmcResult run_precision_smc(const PrecisionSmcParams& p);

// ------------------------------------------------------------ bias-accumulation

struct BiasAccumulationParams {
  std::size_t n = 500;
  double data_variance = 0.1;
  std::size_t P = 50, M = 20;
  std::size_t replicates = 20;
  std::uint64_t seed = 1;
};

struct BiasCurve {
  std::string sampler;
  /// Indexed by target t = 1..n (entry t-1).
  std::vector<double> bias, se, mse;
  std::vector<double> final_estimates;
  std::uint64_t sweeps = 0;
};

struct BiasAccumulationResult {
  std::vector<double> oracle;  // per prefix, t = 1..n
  std::vector<BiasCurve> curves;  // exact, unbiased-is, bridge-mcmc, bridge-perfect
};

BiasAccumulationResult run_bias_accumulation(const BiasAccumulationParams& p);

// ------------------------------------------------------------ prop1-sweep

struct Prop1SweepParams {
  std::size_t instances = 1000;
  FlowGenerator generator;
  std::uint64_t seed = 1;
};

struct Prop1Row {
  std::size_t instance = 0;
  double gamma_rel = 0, eps_M = 0, eps_G = 0, sup_tv = 0, bound = 0, margin = 0;
  /// Smallest 2 gamma_t - TV(Psi_G~(eta), Psi_G(eta)) over the steps.
  double lemma_margin = 0;
  bool holds = false;
};

struct Prop1SweepResult {
  std::vector<Prop1Row> rows;
  std::size_t holding = 0;
  double min_margin = 0, min_lemma_margin = 0;
};

Prop1SweepResult run_prop1_sweep(const Prop1SweepParams& p);
CsvTable prop1_table(const Prop1SweepResult& res, const FlowGenerator& g);

// ------------------------------------------------------------ ergm-synthetic

struct ErgmSyntheticParams {
  std::size_t nodes = 16;
  /// Data generated from the edges model at this log-odds.
  double theta_edges = -1.5;
  std::size_t pilot_steps = 2000;
  std::uint32_t B = 20;
  std::size_t P = 1000, sl_M = 100;
  std::size_t mavis_K = 84, mavis_M = 20;
  std::size_t smc_particles = 200, smc_targets = 100;
  std::uint64_t seed = 1;
};

struct ErgmSyntheticResult {
  double log_bf_sl = 0.0, log_bf_mavis = 0.0;
  double log_evidence_mavis_edges = 0.0, log_evidence_mavis_two_star = 0.0;
  double log_evidence_edges_exact = 0.0;
  std::uint64_t sweeps_sl = 0, sweeps_mavis = 0;
};

ErgmSyntheticResult run_ergm_synthetic(const ErgmSyntheticParams& p);

// ------------------------------------------------------------ driver

struct ExperimentOutput {
  std::string id;
  /// File name -> table, written in this order.
  std::vector<std::pair<std::string, CsvTable>> tables;
  std::vector<std::string> notices;
};

/// Reads parameters from the config, runs the experiment and builds the
/// per-replicate and summary tables (nothing is written).
ExperimentOutput run_experiment(const ExperimentConfig& cfg);

/// Writes the tables plus a copy of the config text into cfg.output.
void write_experiment(const ExperimentConfig& cfg, const ExperimentOutput& out, const std::string& config_text);

}  // namespace evd
