#include "evd/theory/biased_is.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "evd/core/types.hpp"

namespace evd {

void BiasedWeightLaw::validate() const {
  const auto n = q.size();
  if (n == 0) throw ContractViolation("weight law: empty grid");
  if (w.size() != n || b.size() != n || var_biased.size() != n || var_unbiased.size() != n)
    throw ContractViolation("weight law: inconsistent grid sizes");
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (q[i] < 0.0 || var_biased[i] < 0.0 || var_unbiased[i] < 0.0)
      throw ContractViolation("weight law: negative probability or variance");
    s += q[i];
  }
  if (std::abs(s - 1.0) > 1e-12) throw ContractViolation("weight law: q does not sum to 1");
}

std::string to_string(BreakevenVerdict v) {
  switch (v) {
    case BreakevenVerdict::threshold: return "threshold";
    case BreakevenVerdict::unbiased_dominates: return "unbiased-dominates";
    case BreakevenVerdict::biased_dominates: return "biased-dominates";
  }
  return "?";
}

namespace {

struct Moments {
  double mw = 0, mb = 0, vw = 0, vb = 0, cwb = 0, sb = 0, su = 0;
};

Moments grid_moments(const BiasedWeightLaw& law) {
  law.validate();
  Moments m;
  for (std::size_t i = 0; i < law.size(); ++i) {
    m.mw += law.q[i] * law.w[i];
    m.mb += law.q[i] * law.b[i];
    m.sb += law.q[i] * law.var_biased[i];
    m.su += law.q[i] * law.var_unbiased[i];
  }
  for (std::size_t i = 0; i < law.size(); ++i) {
    const double dw = law.w[i] - m.mw, db = law.b[i] - m.mb;
    m.vw += law.q[i] * dw * dw;
    m.vb += law.q[i] * db * db;
    m.cwb += law.q[i] * dw * db;
  }
  return m;
}

}  // namespace

BreakevenResult biased_is_breakeven(const BiasedWeightLaw& law) {
  const auto m = grid_moments(law);
  BreakevenResult r;
  r.mean_b = m.mb;
  r.var_w = m.vw;
  r.var_b = m.vb;
  r.cov_wb = m.cwb;
  r.mean_var_biased = m.sb;
  r.mean_var_unbiased = m.su;
  const double num = m.su - m.sb - m.vb - 2.0 * m.cwb;
  if (m.mb == 0.0) {
    r.verdict = num > 0.0 ? BreakevenVerdict::biased_dominates : BreakevenVerdict::unbiased_dominates;
    r.threshold = num > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    return r;
  }
  r.threshold = num / (m.mb * m.mb);
  r.verdict = r.threshold > 0.0 ? BreakevenVerdict::threshold : BreakevenVerdict::unbiased_dominates;
  return r;
}

double mse_biased(const BiasedWeightLaw& law, double P) {
  const auto m = grid_moments(law);
  return (m.vw + 2.0 * m.cwb + m.vb + m.sb) / P + m.mb * m.mb;
}

double mse_unbiased(const BiasedWeightLaw& law, double P) {
  const auto m = grid_moments(law);
  return (m.vw + m.su) / P;
}

std::vector<MseCurvePoint> mse_curves(const BiasedWeightLaw& law, const std::vector<double>& sizes) {
  std::vector<MseCurvePoint> out;
  out.reserve(sizes.size());
  for (double P : sizes) {
    if (!(P > 0.0)) throw ContractViolation("mse_curves: sample sizes must be positive");
    out.push_back({P, mse_biased(law, P), mse_unbiased(law, P)});
  }
  return out;
}

BiasedWeightLaw random_weight_law(std::size_t states, RngStream& rng) {
  BiasedWeightLaw law;
  double s = 0.0;
  for (std::size_t i = 0; i < states; ++i) {
    law.q.push_back(rng.exponential(1.0));
    s += law.q.back();
    law.w.push_back(rng.exponential(1.0));
    law.b.push_back(0.3 * (rng.uniform() - 0.3));
    law.var_biased.push_back(0.2 * rng.uniform());
    law.var_unbiased.push_back(1.0 + 2.0 * rng.uniform());
  }
  for (auto& x : law.q) x /= s;
  return law;
}

SimulatedMse simulate_mse(const BiasedWeightLaw& law, std::size_t P, std::size_t replicates, RngStream& rng) {
  const auto m = grid_moments(law);
  std::vector<double> cdf(law.size());
  double c = 0.0;
  for (std::size_t i = 0; i < law.size(); ++i) cdf[i] = (c += law.q[i]);
  auto pick = [&](double u) {
    const auto it = std::upper_bound(cdf.begin(), cdf.end() - 1, u * c);
    return static_cast<std::size_t>(it - cdf.begin());
  };
  double sb = 0, sb2 = 0, su = 0, su2 = 0;
  for (std::size_t r = 0; r < replicates; ++r) {
    double eb = 0.0, eu = 0.0;
    for (std::size_t p = 0; p < P; ++p) {
      const std::size_t i = pick(rng.uniform());
      eb += law.w[i] + law.b[i] + std::sqrt(law.var_biased[i]) * rng.normal();
      eu += law.w[i] + std::sqrt(law.var_unbiased[i]) * rng.normal();
    }
    const double db = eb / static_cast<double>(P) - m.mw, du = eu / static_cast<double>(P) - m.mw;
    sb += db * db;
    sb2 += db * db * db * db;
    su += du * du;
    su2 += du * du * du * du;
  }
  const double R = static_cast<double>(replicates);
  SimulatedMse out;
  out.biased = sb / R;
  out.unbiased = su / R;
  out.se_biased = std::sqrt(std::max(0.0, sb2 / R - out.biased * out.biased) / R);
  out.se_unbiased = std::sqrt(std::max(0.0, su2 / R - out.unbiased * out.unbiased) / R);
  return out;
}

}  // namespace evd
