#include "evd/models/precision.hpp"

#include <cmath>
#include <numbers>

namespace evd {
namespace {

const double kLog2Pi = std::log(2.0 * std::numbers::pi);

Eigen::VectorXd standard_normal(std::size_t d, RngStream& rng) {
  Eigen::VectorXd z(static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = rng.normal();
  return z;
}

}  // namespace

Eigen::MatrixXd cholesky_from_theta(const ParameterVector& theta, std::size_t d) {
  if (static_cast<std::size_t>(theta.size()) != d * (d + 1) / 2)
    throw ContractViolation("precision parameter has the wrong length");
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j <= i; ++j) L(i, j) = theta[static_cast<Eigen::Index>(i * (i + 1) / 2 + j)];
  return L;
}

ParameterVector theta_from_cholesky(const Eigen::MatrixXd& L) {
  const auto d = static_cast<std::size_t>(L.rows());
  ParameterVector theta(static_cast<Eigen::Index>(d * (d + 1) / 2));
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j <= i; ++j) theta[static_cast<Eigen::Index>(i * (i + 1) / 2 + j)] = L(i, j);
  return theta;
}

double log_multigamma(double a, std::size_t d) {
  double s = 0.25 * static_cast<double>(d * (d - 1)) * std::log(std::numbers::pi);
  for (std::size_t j = 1; j <= d; ++j) s += std::lgamma(a + 0.5 * (1.0 - static_cast<double>(j)));
  return s;
}

Eigen::MatrixXd scatter(const Vectors& y, std::size_t k) {
  if (k > y.size()) throw ContractViolation("unit count exceeds data size");
  if (y.empty()) return {};
  const auto d = y.front().size();
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(d, d);
  for (std::size_t i = 0; i < k; ++i) S.selfadjointView<Eigen::Lower>().rankUpdate(y[i]);
  return S.selfadjointView<Eigen::Lower>();
}

GaussianPrecisionModel::GaussianPrecisionModel(std::size_t d)
    : GaussianPrecisionModel(d, 10.0 + static_cast<double>(d),
                             Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d))) {}

GaussianPrecisionModel::GaussianPrecisionModel(std::size_t d, double nu, Eigen::MatrixXd V)
    : d_(d), nu_(nu), V_(std::move(V)) {
  if (d == 0) throw ContractViolation("precision model needs d >= 1");
  if (!(nu > static_cast<double>(d) - 1.0)) throw ContractViolation("Wishart degrees of freedom must exceed d - 1");
  Eigen::LLT<Eigen::MatrixXd> llt(V_);
  if (llt.info() != Eigen::Success) throw DomainError("Wishart scale matrix must be positive definite");
  V_inv_ = llt.solve(Eigen::MatrixXd::Identity(V_.rows(), V_.cols()));
  log_det_V_ = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
}

double GaussianPrecisionModel::log_prior(const ParameterVector& theta) const {
  const Eigen::MatrixXd L = cholesky_from_theta(theta, d_);
  double sum_log_diag = 0.0, log_jac = static_cast<double>(d_) * std::log(2.0);
  for (std::size_t i = 0; i < d_; ++i) {
    if (!(L(i, i) > 0.0)) return kNegInf;
    const double l = std::log(L(i, i));
    sum_log_diag += l;
    log_jac += static_cast<double>(d_ - i) * l;
  }
  const double dd = static_cast<double>(d_);
  const double trace = (L.transpose() * V_inv_ * L).trace();
  const double log_wishart = (nu_ - dd - 1.0) * sum_log_diag - 0.5 * trace - 0.5 * nu_ * dd * std::log(2.0) -
                             0.5 * nu_ * log_det_V_ - log_multigamma(0.5 * nu_, d_);
  return log_wishart + log_jac;
}

ParameterVector GaussianPrecisionModel::wishart_cholesky_draw(double dof, const Eigen::MatrixXd& scale,
                                                              RngStream& rng) const {
  // Bartlett: L = C A with scale = C C'.
  const auto d = static_cast<Eigen::Index>(d_);
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    A(i, i) = std::sqrt(rng.chi_squared(dof - static_cast<double>(i)));
    for (Eigen::Index j = 0; j < i; ++j) A(i, j) = rng.normal();
  }
  const Eigen::MatrixXd C = scale.llt().matrixL();
  return theta_from_cholesky(C * A);
}

ParameterVector GaussianPrecisionModel::sample_prior(RngStream& rng) const {
  return wishart_cholesky_draw(nu_, V_, rng);
}

double GaussianPrecisionModel::log_gamma(const Data& y, const ParameterVector& theta, std::size_t k) const {
  if (k > y.size()) throw ContractViolation("unit count exceeds data size");
  const Eigen::MatrixXd L = cholesky_from_theta(theta, d_);
  double s = 0.0;
  for (std::size_t i = 0; i < k; ++i) s += (L.transpose() * y[i]).squaredNorm();
  return -0.5 * s;
}

GaussianPrecisionModel::Data GaussianPrecisionModel::simulate(const ParameterVector& theta, std::size_t k,
                                                              RngStream& rng, const SimConfig&) const {
  const Eigen::MatrixXd L = cholesky_from_theta(theta, d_);
  Data out(k);
  for (auto& v : out) v = L.transpose().triangularView<Eigen::Upper>().solve(standard_normal(d_, rng));
  return out;
}

double GaussianPrecisionModel::exact_log_z(const ParameterVector& theta, std::size_t k) const {
  double sum_log_diag = 0.0;
  for (std::size_t i = 0; i < d_; ++i) sum_log_diag += std::log(theta[static_cast<Eigen::Index>(i * (i + 1) / 2 + i)]);
  return static_cast<double>(k) * (0.5 * static_cast<double>(d_) * kLog2Pi - sum_log_diag);
}

SummaryVector GaussianPrecisionModel::summary(const Data& y) const {
  if (y.empty()) return SummaryVector::Zero(static_cast<Eigen::Index>(dim()));
  return theta_from_cholesky(scatter(y, y.size()).triangularView<Eigen::Lower>());
}

ParameterVector GaussianPrecisionModel::posterior_draw(const Data& y, std::size_t k, RngStream& rng) const {
  Eigen::MatrixXd B = V_inv_;
  if (k > 0) B += scatter(y, k);
  const Eigen::MatrixXd scale = B.llt().solve(Eigen::MatrixXd::Identity(B.rows(), B.cols()));
  return wishart_cholesky_draw(nu_ + static_cast<double>(k), scale, rng);
}

GaussianPrecisionModel::LogTarget GaussianPrecisionModel::make_log_target(const Data& y, std::size_t k) const {
  LogTarget t;
  t.d_ = d_;
  t.B_ = V_inv_;
  if (k > 0) t.B_ += scatter(y, k);
  t.diag_coef_.resize(static_cast<Eigen::Index>(d_));
  for (std::size_t i = 0; i < d_; ++i)
    t.diag_coef_[static_cast<Eigen::Index>(i)] =
        nu_ - static_cast<double>(d_) - 1.0 + static_cast<double>(k) + static_cast<double>(d_ - i);
  return t;
}

double GaussianPrecisionModel::LogTarget::operator()(const ParameterVector& theta) const {
  const Eigen::MatrixXd L = cholesky_from_theta(theta, d_);
  double s = 0.0;
  for (std::size_t i = 0; i < d_; ++i) {
    if (!(L(i, i) > 0.0)) return kNegInf;
    s += diag_coef_[static_cast<Eigen::Index>(i)] * std::log(L(i, i));
  }
  return s - 0.5 * (L.transpose() * B_ * L).trace();
}

double gaussian_precision_log_evidence(const Vectors& y, double nu, const Eigen::MatrixXd& V) {
  if (y.empty()) return 0.0;
  Eigen::LLT<Eigen::MatrixXd> llt_v(V);
  if (llt_v.info() != Eigen::Success) throw DomainError("Wishart scale matrix must be positive definite");
  const auto d = static_cast<std::size_t>(V.rows());
  const double n = static_cast<double>(y.size());
  const Eigen::MatrixXd V_inv = llt_v.solve(Eigen::MatrixXd::Identity(V.rows(), V.cols()));
  Eigen::LLT<Eigen::MatrixXd> llt_b(V_inv + scatter(y, y.size()));
  const double log_det_V = 2.0 * llt_v.matrixL().toDenseMatrix().diagonal().array().log().sum();
  const double log_det_B = 2.0 * llt_b.matrixL().toDenseMatrix().diagonal().array().log().sum();
  return -0.5 * n * static_cast<double>(d) * std::log(std::numbers::pi) + log_multigamma(0.5 * (nu + n), d) -
         log_multigamma(0.5 * nu, d) - 0.5 * (nu + n) * log_det_B - 0.5 * nu * log_det_V;
}

Eigen::MatrixXd precision_mle(const Vectors& y) {
  if (y.empty()) throw ContractViolation("precision_mle: empty data");
  const Eigen::MatrixXd cov = scatter(y, y.size()) / static_cast<double>(y.size());
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) throw DomainError("precision_mle: sample covariance is singular");
  return llt.solve(Eigen::MatrixXd::Identity(cov.rows(), cov.cols()));
}

GaussianUnitAux::GaussianUnitAux(Eigen::MatrixXd precision) {
  Eigen::LLT<Eigen::MatrixXd> llt(precision);
  if (llt.info() != Eigen::Success) throw DomainError("auxiliary precision must be positive definite");
  chol_ = llt.matrixL();
  log_norm_ = chol_.diagonal().array().log().sum() - 0.5 * static_cast<double>(chol_.rows()) * kLog2Pi;
}

double GaussianUnitAux::log_density(const Vectors& u, std::size_t begin, std::size_t end) const {
  double s = 0.0;
  for (std::size_t i = begin; i < end; ++i) s += log_norm_ - 0.5 * (chol_.transpose() * u[i]).squaredNorm();
  return s;
}

void GaussianUnitAux::fill(Vectors& out, std::size_t begin, std::size_t end, RngStream& rng) const {
  if (out.size() < end) out.resize(end);
  for (std::size_t i = begin; i < end; ++i)
    out[i] = chol_.transpose().triangularView<Eigen::Upper>().solve(
        standard_normal(static_cast<std::size_t>(chol_.rows()), rng));
}

}  // namespace evd
