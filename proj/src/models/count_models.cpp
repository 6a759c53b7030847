#include "evd/models/count_models.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace evd {
namespace {

void check_counts(const Counts& y) {
  for (auto c : y)
    if (c < 0) throw DomainError("count data must be non-negative");
}

std::int64_t prefix_sum(const Counts& y, std::size_t k) {
  if (k > y.size()) throw ContractViolation("unit count exceeds data size");
  return std::accumulate(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(k), std::int64_t{0});
}

double log_factorial_sum(const Counts& y, std::size_t k) {
  double s = 0.0;
  for (std::size_t i = 0; i < k; ++i) s += std::lgamma(static_cast<double>(y[i]) + 1.0);
  return s;
}

SummaryVector count_summary(const Counts& y) {
  SummaryVector s(2);
  s << static_cast<double>(prefix_sum(y, y.size())), log_factorial_sum(y, y.size());
  return s;
}

// Coordinates are independent given eta, so a single-site Gibbs update is an
// exact draw. A Gibbs "simulation" starts from all zeros; B >= 1 sweeps are
// therefore exact and B = 0 returns the start state.
template <class Draw>
Counts iid_draw(std::size_t k, const SimConfig& sim, Draw&& draw) {
  Counts u(k, 0);
  if (sim.mode == SimMode::gibbs && sim.burn_in == 0) return u;
  for (auto& c : u) c = draw();
  return u;
}

// Inversion sampler for a fixed discrete law on {0, 1, ...}; draws past the
// tabulated range fall back to `tail`.
class CountTable {
 public:
  template <class LogPmf>
  explicit CountTable(LogPmf&& log_pmf) {
    double acc = 0.0;
    for (std::int64_t y = 0; y < kMaxLen && acc < 1.0 - 1e-15; ++y) {
      acc += std::exp(log_pmf(y));
      cdf_.push_back(acc);
      log_fact_.push_back(std::lgamma(static_cast<double>(y) + 1.0));
    }
  }

  template <class Tail>
  std::int64_t draw(RngStream& rng, Tail&& tail) const {
    const double u = rng.uniform();
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    if (it == cdf_.end()) return tail();
    return it - cdf_.begin();
  }

  double log_factorial(std::int64_t y) const {
    return y < static_cast<std::int64_t>(log_fact_.size()) ? log_fact_[static_cast<std::size_t>(y)]
                                                          : std::lgamma(static_cast<double>(y) + 1.0);
  }

 private:
  static constexpr std::int64_t kMaxLen = 1 << 16;
  std::vector<double> cdf_;
  std::vector<double> log_fact_;
};

template <class Tail>
std::vector<SummaryVector> table_summaries(const CountTable& table, std::size_t k, std::size_t count, RngStream& rng,
                                           Tail&& tail) {
  std::vector<SummaryVector> out(count);
  for (auto& s : out) {
    double sum = 0.0, lf = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      const std::int64_t y = table.draw(rng, tail);
      sum += static_cast<double>(y);
      lf += table.log_factorial(y);
    }
    s.resize(2);
    s << sum, lf;
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------- Poisson

double PoissonModel::log_prior(const ParameterVector& theta) const {
  return theta[0] > 0.0 ? -theta[0] : kNegInf;
}

ParameterVector PoissonModel::sample_prior(RngStream& rng) const {
  return ParameterVector::Constant(1, rng.exponential(1.0));
}

double PoissonModel::log_gamma(const Data& y, const ParameterVector& theta, std::size_t k) const {
  if (theta[0] <= 0.0) return kNegInf;
  return std::log(theta[0]) * static_cast<double>(prefix_sum(y, k)) - log_factorial_sum(y, k);
}

PoissonModel::Data PoissonModel::simulate(const ParameterVector& theta, std::size_t k, RngStream& rng,
                                          const SimConfig& sim) const {
  return iid_draw(k, sim, [&] { return rng.poisson(theta[0]); });
}

double PoissonModel::exact_log_z(const ParameterVector& theta, std::size_t k) const {
  return static_cast<double>(k) * theta[0];
}

SummaryVector PoissonModel::summary(const Data& y) const { return count_summary(y); }

ParameterVector PoissonModel::posterior_draw(const Data& y, std::size_t k, RngStream& rng) const {
  const double shape = static_cast<double>(prefix_sum(y, k)) + 1.0;
  const double rate = static_cast<double>(k) + 1.0;
  return ParameterVector::Constant(1, rng.gamma(shape, 1.0 / rate));
}

Eigen::VectorXd PoissonModel::natural(const ParameterVector& theta) const {
  return Eigen::VectorXd::Constant(1, std::log(theta[0]));
}

Eigen::VectorXd PoissonModel::stats(const Data& y, std::size_t k) const {
  return Eigen::VectorXd::Constant(1, static_cast<double>(prefix_sum(y, k)));
}

double PoissonModel::log_base(const Data& y, std::size_t k) const { return -log_factorial_sum(y, k); }

PoissonModel::Data PoissonModel::draw_natural(const Eigen::VectorXd& eta, std::size_t k, RngStream& rng,
                                              const SimConfig& sim) const {
  const double mu = std::exp(eta[0]);
  return iid_draw(k, sim, [&] { return rng.poisson(mu); });
}

void PoissonModel::sweep_natural(Data& u, const Eigen::VectorXd& eta, std::size_t k, RngStream& rng) const {
  const double mu = std::exp(eta[0]);
  for (std::size_t i = 0; i < k; ++i) u[i] = rng.poisson(mu);
}

Eigen::VectorXd PoissonModel::draw_stats(const Eigen::VectorXd& eta, std::size_t k, RngStream& rng) const {
  return Eigen::VectorXd::Constant(1, static_cast<double>(rng.poisson(static_cast<double>(k) * std::exp(eta[0]))));
}

std::vector<SummaryVector> PoissonModel::simulate_summaries(const ParameterVector& theta, std::size_t k,
                                                            std::size_t count, RngStream& rng) const {
  const double lambda = theta[0];
  const double log_lambda = std::log(lambda);
  CountTable table([&](std::int64_t y) {
    return static_cast<double>(y) * log_lambda - lambda - std::lgamma(static_cast<double>(y) + 1.0);
  });
  return table_summaries(table, k, count, rng, [&] { return rng.poisson(lambda); });
}

// -------------------------------------------------------------- Geometric

double GeometricModel::log_prior(const ParameterVector& theta) const {
  return theta[0] > 0.0 && theta[0] < 1.0 ? 0.0 : kNegInf;
}

ParameterVector GeometricModel::sample_prior(RngStream& rng) const {
  return ParameterVector::Constant(1, rng.uniform());
}

double GeometricModel::log_gamma(const Data& y, const ParameterVector& theta, std::size_t k) const {
  if (theta[0] <= 0.0 || theta[0] >= 1.0) return kNegInf;
  return std::log1p(-theta[0]) * static_cast<double>(prefix_sum(y, k));
}

GeometricModel::Data GeometricModel::simulate(const ParameterVector& theta, std::size_t k, RngStream& rng,
                                              const SimConfig& sim) const {
  return iid_draw(k, sim, [&] { return rng.geometric(theta[0]); });
}

double GeometricModel::exact_log_z(const ParameterVector& theta, std::size_t k) const {
  return -static_cast<double>(k) * std::log(theta[0]);
}

SummaryVector GeometricModel::summary(const Data& y) const { return count_summary(y); }

ParameterVector GeometricModel::posterior_draw(const Data& y, std::size_t k, RngStream& rng) const {
  // Beta(k + 1, S + 1) via two gammas.
  const double a = rng.gamma(static_cast<double>(k) + 1.0, 1.0);
  const double b = rng.gamma(static_cast<double>(prefix_sum(y, k)) + 1.0, 1.0);
  return ParameterVector::Constant(1, a / (a + b));
}

Eigen::VectorXd GeometricModel::natural(const ParameterVector& theta) const {
  return Eigen::VectorXd::Constant(1, std::log1p(-theta[0]));
}

Eigen::VectorXd GeometricModel::stats(const Data& y, std::size_t k) const {
  return Eigen::VectorXd::Constant(1, static_cast<double>(prefix_sum(y, k)));
}

GeometricModel::Data GeometricModel::draw_natural(const Eigen::VectorXd& eta, std::size_t k, RngStream& rng,
                                                  const SimConfig& sim) const {
  const double p = -std::expm1(eta[0]);
  return iid_draw(k, sim, [&] { return rng.geometric(p); });
}

void GeometricModel::sweep_natural(Data& u, const Eigen::VectorXd& eta, std::size_t k, RngStream& rng) const {
  const double p = -std::expm1(eta[0]);
  for (std::size_t i = 0; i < k; ++i) u[i] = rng.geometric(p);
}

double GeometricModel::log_z_base(std::size_t) const {
  throw Unsupported("geometric model: base measure at eta = 0 is not finite");
}

Eigen::VectorXd GeometricModel::draw_stats(const Eigen::VectorXd& eta, std::size_t k, RngStream& rng) const {
  const double p = -std::expm1(eta[0]);
  return Eigen::VectorXd::Constant(1, static_cast<double>(rng.negative_binomial(static_cast<std::int64_t>(k), p)));
}

std::vector<SummaryVector> GeometricModel::simulate_summaries(const ParameterVector& theta, std::size_t k,
                                                              std::size_t count, RngStream& rng) const {
  const double p = theta[0];
  const double log_p = std::log(p), log_q = std::log1p(-p);
  CountTable table([&](std::int64_t y) { return log_p + static_cast<double>(y) * log_q; });
  return table_summaries(table, k, count, rng, [&] { return rng.geometric(p); });
}

// -------------------------------------------------------------- evidences

double poisson_log_evidence(const Counts& y) {
  check_counts(y);
  const double s = static_cast<double>(prefix_sum(y, y.size()));
  const double n = static_cast<double>(y.size());
  return std::lgamma(s + 1.0) - (s + 1.0) * std::log(n + 1.0) - log_factorial_sum(y, y.size());
}

double geometric_log_evidence(const Counts& y) {
  check_counts(y);
  const double s = static_cast<double>(prefix_sum(y, y.size()));
  const double n = static_cast<double>(y.size());
  return std::lgamma(n + 1.0) + std::lgamma(s + 1.0) - std::lgamma(n + s + 2.0);
}

}  // namespace evd
