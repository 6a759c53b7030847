#pragma once

#include <vector>

#include "evd/core/model.hpp"

namespace evd {

using Vectors = std::vector<Eigen::VectorXd>;

/// Lower-triangular L <-> parameter vector of its entries a_ij (j <= i),
/// stored at index i(i+1)/2 + j.
Eigen::MatrixXd cholesky_from_theta(const ParameterVector& theta, std::size_t d);
ParameterVector theta_from_cholesky(const Eigen::MatrixXd& L);

/// log of the multivariate gamma function Gamma_d(a).
double log_multigamma(double a, std::size_t d);

/// Zero-mean Gaussian with precision LL', Wishart(nu, V) prior on LL'
/// carried over to the Cholesky entries (the log-Jacobian is included in
/// log_prior). gamma(y|L) = exp(-1/2 sum_i |L'y_i|^2), Z = |2 pi Sigma|^{k/2}.
class GaussianPrecisionModel {
 public:
  using Data = Vectors;
  static constexpr bool iid_units = true;

  /// nu defaults to 10 + d and V to the identity.
  explicit GaussianPrecisionModel(std::size_t d);
  GaussianPrecisionModel(std::size_t d, double nu, Eigen::MatrixXd V);

  std::size_t d() const { return d_; }
  double nu() const { return nu_; }
  const Eigen::MatrixXd& V() const { return V_; }

  std::size_t dim() const { return d_ * (d_ + 1) / 2; }
  std::size_t units(const Data& y) const { return y.size(); }

  double log_prior(const ParameterVector& theta) const;
  ParameterVector sample_prior(RngStream& rng) const;
  double log_gamma(const Data& y, const ParameterVector& theta, std::size_t k) const;
  Data simulate(const ParameterVector& theta, std::size_t k, RngStream& rng, const SimConfig& sim) const;
  double exact_log_z(const ParameterVector& theta, std::size_t k) const;
  /// Lower triangle of sum_i y_i y_i'.
  SummaryVector summary(const Data& y) const;

  /// Exact draw from the posterior given the first k units, Wishart(nu + k, (V^-1 + S_k)^-1).
  ParameterVector posterior_draw(const Data& y, std::size_t k, RngStream& rng) const;

  /// log p(theta) + log f(y_{1:k}|theta) up to an additive constant; cheap to
  /// evaluate repeatedly inside MH sweeps.
  class LogTarget {
   public:
    double operator()(const ParameterVector& theta) const;

   private:
    friend class GaussianPrecisionModel;
    std::size_t d_ = 0;
    Eigen::MatrixXd B_;
    Eigen::VectorXd diag_coef_;
  };
  LogTarget make_log_target(const Data& y, std::size_t k) const;

 private:
  ParameterVector wishart_cholesky_draw(double dof, const Eigen::MatrixXd& scale, RngStream& rng) const;

  std::size_t d_;
  double nu_;
  Eigen::MatrixXd V_;
  Eigen::MatrixXd V_inv_;
  double log_det_V_;
};

/// Scatter matrix sum_{i<k} y_i y_i'.
Eigen::MatrixXd scatter(const Vectors& y, std::size_t k);

/// Closed-form log evidence of y under the model; 0 for empty data.
double gaussian_precision_log_evidence(const Vectors& y, double nu, const Eigen::MatrixXd& V);

/// Maximum likelihood precision (S/n)^-1.
Eigen::MatrixXd precision_mle(const Vectors& y);

/// q_w for data-point tempering: i.i.d. N(0, Sigma) per unit.
class GaussianUnitAux {
 public:
  GaussianUnitAux(Eigen::MatrixXd precision);

  double log_density(const Vectors& u, std::size_t begin, std::size_t end) const;
  void fill(Vectors& out, std::size_t begin, std::size_t end, RngStream& rng) const;

 private:
  Eigen::MatrixXd chol_;  // lower Cholesky factor of the precision
  double log_norm_;
};

}  // namespace evd
