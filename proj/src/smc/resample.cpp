#include "evd/smc/resample.hpp"

#include <cmath>

#include "evd/core/log_math.hpp"
#include "evd/core/types.hpp"

namespace evd {

ResampleScheme parse_resample_scheme(const std::string& name) {
  if (name == "multinomial") return ResampleScheme::multinomial;
  if (name == "stratified") return ResampleScheme::stratified;
  if (name == "systematic") return ResampleScheme::systematic;
  throw ContractViolation("unknown resampling scheme '" + name + "'");
}

const char* to_string(ResampleScheme s) {
  switch (s) {
    case ResampleScheme::multinomial: return "multinomial";
    case ResampleScheme::stratified: return "stratified";
    case ResampleScheme::systematic: return "systematic";
  }
  return "?";
}

std::vector<std::size_t> resample_indices(std::span<const double> log_w, std::size_t count, ResampleScheme scheme,
                                          RngStream& rng) {
  if (log_w.empty() || count == 0) throw ContractViolation("resample: empty input");
  const double total = log_sum_exp(log_w);
  if (!std::isfinite(total)) throw NumericalAbort("resample: weights are all zero or not finite");
  std::vector<double> cdf(log_w.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < log_w.size(); ++i) {
    acc += std::exp(log_w[i] - total);
    cdf[i] = acc;
  }
  cdf.back() = 1.0;

  // Sorted uniforms on [0, 1).
  std::vector<double> u(count);
  const double n = static_cast<double>(count);
  switch (scheme) {
    case ResampleScheme::multinomial: {
      // Sorted via normalised exponential spacings.
      double s = 0.0;
      for (auto& v : u) {
        s += rng.exponential(1.0);
        v = s;
      }
      s += rng.exponential(1.0);
      for (auto& v : u) v /= s;
      break;
    }
    case ResampleScheme::stratified:
      for (std::size_t i = 0; i < count; ++i) u[i] = (static_cast<double>(i) + rng.uniform()) / n;
      break;
    case ResampleScheme::systematic: {
      const double off = rng.uniform();
      for (std::size_t i = 0; i < count; ++i) u[i] = (static_cast<double>(i) + off) / n;
      break;
    }
  }
  std::vector<std::size_t> out(count);
  std::size_t j = 0;
  for (std::size_t i = 0; i < count; ++i) {
    while (j + 1 < cdf.size() && cdf[j] <= u[i]) ++j;
    out[i] = j;
  }
  return out;
}

std::vector<std::size_t> offspring_counts(std::span<const std::size_t> ancestors, std::size_t particles) {
  std::vector<std::size_t> c(particles, 0);
  for (auto a : ancestors) {
    if (a >= particles) throw ContractViolation("offspring_counts: ancestor out of range");
    ++c[a];
  }
  return c;
}

}  // namespace evd
