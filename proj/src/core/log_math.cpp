#include "evd/core/log_math.hpp"

#include <algorithm>
#include <cmath>

#include "evd/core/types.hpp"

namespace evd {

double log_sum_exp(std::span<const double> terms) {
  if (terms.empty()) throw ContractViolation("log_sum_exp: empty input");
  const double m = *std::max_element(terms.begin(), terms.end());
  if (std::isnan(m)) return m;
  if (!std::isfinite(m)) return m;  // all -inf, or some +inf
  double s = 0.0;
  for (double x : terms) s += std::exp(x - m);
  return m + std::log(s);
}

double log_mean_exp(std::span<const double> terms) {
  return log_sum_exp(terms) - std::log(static_cast<double>(terms.size()));
}

double log_weighted_sum_exp(std::span<const double> log_w, std::span<const double> terms) {
  if (log_w.size() != terms.size()) throw ContractViolation("log_weighted_sum_exp: size mismatch");
  std::vector<double> z(terms.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    // 0 * inf is taken as 0: a zero-weight particle contributes nothing.
    z[i] = log_w[i] == kNegInf ? kNegInf : log_w[i] + terms[i];
  }
  return log_sum_exp(z);
}

double normalise_log_weights(std::span<double> log_w) {
  const double total = log_sum_exp(log_w);
  if (!std::isfinite(total)) return total;
  for (double& x : log_w) x -= total;
  return total;
}

double ess(std::span<const double> log_w) {
  const double total = log_sum_exp(log_w);
  if (total == kNegInf) return 0.0;
  double s2 = 0.0;
  for (double x : log_w) {
    const double w = std::exp(x - total);
    s2 += w * w;
  }
  return 1.0 / s2;
}

}  // namespace evd
