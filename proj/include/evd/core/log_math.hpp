#pragma once

#include <span>
#include <vector>

namespace evd {

/// log(sum_i exp(x_i)). Stable for terms spread over thousands of nats;
/// -inf terms are allowed (they contribute zero). Throws ContractViolation on
/// an empty input.
double log_sum_exp(std::span<const double> terms);

/// log of the arithmetic mean of exp(x_i).
double log_mean_exp(std::span<const double> terms);

/// log(sum_i w_i exp(x_i)) with log_w the log of normalised weights.
double log_weighted_sum_exp(std::span<const double> log_w, std::span<const double> terms);

/// Shift log-weights in place so that sum exp(log_w) == 1. Returns the log of
/// the original total. If every entry is -inf the weights are left as is and
/// -inf is returned.
double normalise_log_weights(std::span<double> log_w);

/// Effective sample size 1 / sum w_p^2 of the weights exp(log_w), normalised
/// internally. Returns 0 when every weight is zero.
double ess(std::span<const double> log_w);

inline double log_sum_exp(const std::vector<double>& v) { return log_sum_exp(std::span<const double>(v)); }
inline double log_mean_exp(const std::vector<double>& v) { return log_mean_exp(std::span<const double>(v)); }

}  // namespace evd
