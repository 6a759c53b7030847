#pragma once

#include <string>
#include <vector>

#include "evd/core/rng.hpp"

namespace evd {

/// Discrete law of random IS weights: theta takes grid value i with
/// probability q_i; the unbiased weight is w_i + noise of variance var_unbiased_i,
/// the biased weight is w_i + b_i + noise of variance var_biased_i.
struct BiasedWeightLaw {
  std::vector<double> q;
  std::vector<double> w;
  std::vector<double> b;
  std::vector<double> var_biased;
  std::vector<double> var_unbiased;

  std::size_t size() const { return q.size(); }
  void validate() const;
};

enum class BreakevenVerdict {
  /// Biased estimator has lower MSE exactly when P < threshold.
  threshold,
  /// Unbiased MSE <= biased MSE at every P.
  unbiased_dominates,
  /// Biased MSE < unbiased MSE at every P (only possible when E[b] = 0).
  biased_dominates,
};

std::string to_string(BreakevenVerdict v);

struct BreakevenResult {
  BreakevenVerdict verdict = BreakevenVerdict::threshold;
  double threshold = 0.0;
  double mean_b = 0.0;
  double var_w = 0.0, var_b = 0.0, cov_wb = 0.0;
  double mean_var_biased = 0.0, mean_var_unbiased = 0.0;
};

/// (E[var_unbiased - var_biased] - Var[b] - 2 Cov[w, b]) / E[b]^2 by exact
/// summation over the grid.
BreakevenResult biased_is_breakeven(const BiasedWeightLaw& law);

/// MSE of the P-sample IS mean of the biased / unbiased weights about E_q[w].
double mse_biased(const BiasedWeightLaw& law, double P);
double mse_unbiased(const BiasedWeightLaw& law, double P);

struct MseCurvePoint {
  double P = 0.0;
  double biased = 0.0;
  double unbiased = 0.0;
};

std::vector<MseCurvePoint> mse_curves(const BiasedWeightLaw& law, const std::vector<double>& sizes);

/// Random law on `states` grid points: positive weights, small biases of
/// either sign, noisy unbiased weights and quieter biased ones.
BiasedWeightLaw random_weight_law(std::size_t states, RngStream& rng);

/// Monte Carlo MSE of the two estimators over `replicates` replicates with
/// Gaussian noise; returns {biased, unbiased, se_biased, se_unbiased}.
struct SimulatedMse {
  double biased = 0.0, unbiased = 0.0;
  double se_biased = 0.0, se_unbiased = 0.0;
};

SimulatedMse simulate_mse(const BiasedWeightLaw& law, std::size_t P, std::size_t replicates, RngStream& rng);

}  // namespace evd
