#pragma once

#include <vector>

#include "evd/core/rng.hpp"
#include "evd/core/types.hpp"

namespace evd {

/// Finite-state Feynman-Kac flow with exact potentials G_t and approximate
/// potentials G~_t: eta_t = Psi_{G_{t-1}}(eta_{t-1}) M_t for t = 1..T.
struct FiniteFlow {
  Eigen::VectorXd eta0;
  /// M_1..M_T, row-stochastic n x n.
  std::vector<Eigen::MatrixXd> kernels;
  /// G_0..G_{T-1} and their approximations, strictly positive.
  std::vector<Eigen::VectorXd> potentials;
  std::vector<Eigen::VectorXd> approx_potentials;

  std::size_t states() const { return static_cast<std::size_t>(eta0.size()); }
  std::size_t horizon() const { return kernels.size(); }
  /// Throws ContractViolation on inconsistent sizes, non-stochastic rows or
  /// non-positive potentials.
  void validate() const;
};

/// Psi_G(eta) = eta G / eta(G).
Eigen::VectorXd boltzmann_gibbs(const Eigen::VectorXd& eta, const Eigen::VectorXd& G);

/// Half the L1 distance.
double tv_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

struct FlowPaths {
  std::vector<Eigen::VectorXd> exact;   // eta_0..eta_T
  std::vector<Eigen::VectorXd> approx;  // eta~_0..eta~_T
};

FlowPaths flow_evolve(const FiniteFlow& flow);

struct MixingConstants {
  double gamma_rel = 0.0;
  double eps_M = 1.0;
  double eps_G = 1.0;
  // Where each constant is attained.
  std::size_t gamma_t = 0, gamma_x = 0;
  std::size_t eps_M_t = 0, eps_M_x = 0, eps_M_y = 0, eps_M_z = 0;
  std::size_t eps_G_t = 0, eps_G_x = 0, eps_G_y = 0;
};

/// gamma_rel = max_{t,x} |G - G~| / G~; eps_M = min_{t,x,y,z} M_t(x,z)/M_t(y,z);
/// eps_G = min_{t,x,y} G_t(x)/G_t(y).
MixingConstants measure_constants(const FiniteFlow& flow);

struct Lemma1Result {
  double tv = 0.0;
  double bound = 0.0;  // 2 gamma_rel
  double margin = 0.0;
  bool holds = false;
};

Lemma1Result lemma1_check(const Eigen::VectorXd& eta, const Eigen::VectorXd& G, const Eigen::VectorXd& G_approx);

struct Prop1Result {
  MixingConstants constants;
  double sup_tv = 0.0;
  std::size_t sup_t = 0;
  double bound = 0.0;  // 4 gamma (1 - eps_M) / (eps_M^3 eps_G)
  double margin = 0.0;
  bool holds = false;
  /// eps_M = 0: the bound is infinite and says nothing.
  bool vacuous = false;
};

Prop1Result prop1_check(const FiniteFlow& flow);

struct FlowGenerator {
  std::size_t states = 6;
  std::size_t horizon = 40;
  /// Each kernel row is (1 - alpha) r + alpha / n, alpha ~ Unif(alpha_lo, alpha_hi).
  double alpha_lo = 0.6, alpha_hi = 0.9;
  /// log G ~ Unif(-band, band).
  double log_potential_band = 0.5;
  /// G~ = G (1 + delta), delta ~ Unif(-g, g), g ~ Unif(gamma_lo, gamma_hi).
  double gamma_lo = 1e-3, gamma_hi = 0.1;
};

FiniteFlow random_flow(const FlowGenerator& gen, RngStream& rng);

}  // namespace evd
