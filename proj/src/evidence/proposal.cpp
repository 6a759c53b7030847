#include "evd/evidence/proposal.hpp"

#include <cmath>
#include <numbers>

namespace evd {

IsProposal IsProposal::gaussian(Eigen::VectorXd mean, Eigen::MatrixXd covariance) {
  if (covariance.rows() != mean.size() || covariance.cols() != mean.size())
    throw ContractViolation("gaussian proposal: covariance shape does not match the mean");
  if (!covariance.isApprox(covariance.transpose(), 1e-10)) throw DomainError("gaussian proposal: covariance not symmetric");
  Eigen::LLT<Eigen::MatrixXd> llt(covariance);
  if (llt.info() != Eigen::Success) throw DomainError("gaussian proposal: covariance not positive definite");
  const Eigen::MatrixXd L = llt.matrixL();
  const double log_norm = -L.diagonal().array().log().sum() -
                          0.5 * static_cast<double>(mean.size()) * std::log(2.0 * std::numbers::pi);
  auto sample = [mean, L](RngStream& rng) {
    Eigen::VectorXd z(mean.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = rng.normal();
    return ParameterVector(mean + L * z);
  };
  auto log_density = [mean, L, log_norm](const ParameterVector& t) {
    const Eigen::VectorXd z = L.triangularView<Eigen::Lower>().solve(t - mean);
    return log_norm - 0.5 * z.squaredNorm();
  };
  return IsProposal("gaussian", sample, log_density);
}

}  // namespace evd
