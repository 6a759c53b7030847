#pragma once

#include <concepts>
#include <cstddef>

#include "evd/core/rng.hpp"
#include "evd/core/types.hpp"

namespace evd {

// A model is a likelihood known up to its normalising constant,
// f(y|theta) = gamma(y|theta) / Z(theta), together with a prior.
//
// Data are ordered collections of "units" (observations, lattice sites). Every
// likelihood-side call takes a unit count k and refers to the model restricted
// to the first k units; data-point tempering walks k upwards. Passing
// units(y) gives the full model.
template <class M>
concept UnnormalisedModel =
    requires(const M& m, const typename M::Data& y, const ParameterVector& theta, std::size_t k,
             RngStream& rng, const SimConfig& sim) {
      typename M::Data;
      { m.dim() } -> std::convertible_to<std::size_t>;
      { m.units(y) } -> std::convertible_to<std::size_t>;
      { m.log_prior(theta) } -> std::convertible_to<double>;
      { m.sample_prior(rng) } -> std::same_as<ParameterVector>;
      { m.log_gamma(y, theta, k) } -> std::convertible_to<double>;
      { m.simulate(theta, k, rng, sim) } -> std::same_as<typename M::Data>;
      { m.summary(y) } -> std::same_as<SummaryVector>;
    };

/// Models whose log Z(theta) on k units is computable (analytically or by an
/// exact recursion). Used for oracle weights and the exact-weight SMC.
template <class M>
concept HasExactLogZ = UnnormalisedModel<M> && requires(const M& m, const ParameterVector& theta, std::size_t k) {
  { m.exact_log_z(theta, k) } -> std::convertible_to<double>;
};

/// gamma(y|theta) = exp(eta(theta)' S(y) + log h(y)).
///
/// Exposes the moves needed by annealed importance sampling and by the
/// data-space SMC estimate of Z: draws and Gibbs sweeps at an arbitrary
/// natural parameter, and the normaliser at eta = 0.
template <class M>
concept ExponentialFamilyModel =
    UnnormalisedModel<M> &&
    requires(const M& m, const typename M::Data& y, typename M::Data& u, const ParameterVector& theta,
             const Eigen::VectorXd& eta, std::size_t k, RngStream& rng, const SimConfig& sim) {
      { m.natural(theta) } -> std::same_as<Eigen::VectorXd>;
      { m.stats(y, k) } -> std::same_as<Eigen::VectorXd>;
      { m.log_base(y, k) } -> std::convertible_to<double>;
      { m.draw_natural(eta, k, rng, sim) } -> std::same_as<typename M::Data>;
      m.sweep_natural(u, eta, k, rng);
      { m.log_z_base(k) } -> std::convertible_to<double>;
    };

/// Units are i.i.d. given theta: gamma over k units factorises over units, and
/// simulate(theta, b) is a draw of b fresh units. Tempering estimators then only
/// simulate the block being added.
template <class M>
concept IidUnits = UnnormalisedModel<M> && M::iid_units;

/// Conjugate models that can sample pi_k(theta) \propto p(theta) f(y_{1:k}|theta) exactly.
template <class M>
concept HasPosteriorDraw =
    UnnormalisedModel<M> && requires(const M& m, const typename M::Data& y, std::size_t k, RngStream& rng) {
      { m.posterior_draw(y, k, rng) } -> std::same_as<ParameterVector>;
    };

/// Auxiliary density on a block of units [begin, end) of a dataset, with a
/// sampler that fills that block. Used as q_u (begin = 0) and as q_w in
/// data-point tempering.
template <class A, class Data>
concept BlockAuxiliary = requires(const A& a, const Data& u, Data& out, std::size_t b, std::size_t e, RngStream& rng) {
  { a.log_density(u, b, e) } -> std::convertible_to<double>;
  a.fill(out, b, e, rng);
};

}  // namespace evd
