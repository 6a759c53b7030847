#include "evd/core/moments.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "evd/core/log_math.hpp"

namespace evd {

SampleMoments weighted_moments(std::span<const ParameterVector> xs, std::span<const double> log_w) {
  if (xs.empty() || xs.size() != log_w.size()) throw ContractViolation("weighted_moments: bad sizes");
  const double total = log_sum_exp(log_w);
  const auto d = xs.front().size();
  SampleMoments m{Eigen::VectorXd::Zero(d), Eigen::MatrixXd::Zero(d, d)};
  std::vector<double> w(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    w[i] = std::exp(log_w[i] - total);
    m.mean += w[i] * xs[i];
  }
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const Eigen::VectorXd c = xs[i] - m.mean;
    m.covariance.noalias() += w[i] * c * c.transpose();
  }
  return m;
}

SampleMoments sample_moments(std::span<const ParameterVector> xs) {
  if (xs.empty()) throw ContractViolation("sample_moments: empty");
  const auto d = xs.front().size();
  SampleMoments m{Eigen::VectorXd::Zero(d), Eigen::MatrixXd::Zero(d, d)};
  for (const auto& x : xs) m.mean += x;
  m.mean /= static_cast<double>(xs.size());
  if (xs.size() < 2) return m;
  for (const auto& x : xs) {
    const Eigen::VectorXd c = x - m.mean;
    m.covariance.noalias() += c * c.transpose();
  }
  m.covariance /= static_cast<double>(xs.size() - 1);
  return m;
}

double mean(std::span<const double> x) {
  if (x.empty()) throw ContractViolation("mean: empty");
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double variance(std::span<const double> x) {
  if (x.size() < 2) return 0.0;
  const double mu = mean(x);
  double s = 0.0;
  for (double v : x) s += (v - mu) * (v - mu);
  return s / static_cast<double>(x.size() - 1);
}

double quantile(std::vector<double> x, double p) {
  if (x.empty()) throw ContractViolation("quantile: empty");
  std::sort(x.begin(), x.end());
  const double h = p * static_cast<double>(x.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, x.size() - 1);
  return x[lo] + (h - static_cast<double>(lo)) * (x[hi] - x[lo]);
}

double ols_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw ContractViolation("ols_slope: bad sizes");
  const double mx = mean(x), my = mean(y);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

double batch_means_se(std::span<const double> chain, std::size_t batches) {
  const std::size_t len = chain.size() / batches;
  if (len == 0) throw ContractViolation("batch_means_se: chain shorter than batch count");
  std::vector<double> means(batches);
  for (std::size_t b = 0; b < batches; ++b) means[b] = mean(chain.subspan(b * len, len));
  return std::sqrt(variance(means) / static_cast<double>(batches));
}

}  // namespace evd
