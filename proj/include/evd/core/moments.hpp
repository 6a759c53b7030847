#pragma once

#include <span>
#include <vector>

#include "evd/core/types.hpp"

namespace evd {

struct SampleMoments {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;
};

/// Weighted mean and covariance of a particle cloud; weights are log-domain
/// and need not be normalised. Covariance uses the plain weighted second
/// moment (no small-sample correction).
SampleMoments weighted_moments(std::span<const ParameterVector> xs, std::span<const double> log_w);

/// Unweighted mean and (n-1)-normalised covariance.
SampleMoments sample_moments(std::span<const ParameterVector> xs);

double mean(std::span<const double> x);
/// Sample variance with the n-1 denominator; 0 for a single value.
double variance(std::span<const double> x);

/// Quantile by linear interpolation between order statistics (the
/// "type 7" rule), p in [0, 1].
double quantile(std::vector<double> x, double p);

/// Ordinary least squares slope of y on x.
double ols_slope(std::span<const double> x, std::span<const double> y);

/// Batch-means standard error of the mean of a (possibly autocorrelated)
/// chain.
double batch_means_se(std::span<const double> chain, std::size_t batches = 20);

}  // namespace evd
