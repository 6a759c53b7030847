#pragma once

#include <cmath>

#include "evd/core/model.hpp"
#include "evd/models/ising.hpp"

namespace evd {

/// Independent fair +-1 spins on every site of the block: the q_w used when
/// adding Ising pixels, and a crude q_u.
class UniformSpinAux {
 public:
  double log_density(const Lattice&, std::size_t begin, std::size_t end) const {
    return -static_cast<double>(end - begin) * std::log(2.0);
  }
  void fill(Lattice& out, std::size_t begin, std::size_t end, RngStream& rng) const {
    for (std::size_t s = begin; s < end; ++s) out.spins[s] = rng.uniform() < 0.5 ? 1 : -1;
  }
};

/// q_u = f(.|theta_hat) on k units, normalised with a supplied log Z(theta_hat)
/// (exact, or estimated beforehand by smc_log_z).
template <UnnormalisedModel M>
class ModelAux {
 public:
  ModelAux(const M& model, ParameterVector theta_hat, std::size_t k, double log_z_hat, SimConfig sim = {})
      : model_(&model), theta_hat_(std::move(theta_hat)), k_(k), log_z_hat_(log_z_hat), sim_(sim) {}

  double log_density(const typename M::Data& u, std::size_t begin, std::size_t end) const {
    check(begin, end);
    return model_->log_gamma(u, theta_hat_, k_) - log_z_hat_;
  }
  void fill(typename M::Data& out, std::size_t begin, std::size_t end, RngStream& rng) const {
    check(begin, end);
    out = model_->simulate(theta_hat_, k_, rng, sim_);
  }

  const ParameterVector& theta_hat() const { return theta_hat_; }
  double log_z_hat() const { return log_z_hat_; }

 private:
  void check(std::size_t begin, std::size_t end) const {
    if (begin != 0 || end != k_) throw ContractViolation("ModelAux covers exactly the first k units");
  }

  const M* model_;
  ParameterVector theta_hat_;
  std::size_t k_;
  double log_z_hat_;
  SimConfig sim_;
};

}  // namespace evd
