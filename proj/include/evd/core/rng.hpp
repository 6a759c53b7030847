#pragma once

#include <cstdint>
#include <random>

namespace evd {

/// A reproducible random stream identified by (seed, stream key).
///
/// Child streams are a pure function of the parent's identity and the child
/// id, never of how many numbers the parent has produced. Estimators hand one
/// child to each particle / replicate, so results do not depend on thread
/// scheduling.
class RngStream {
 public:
  using engine_type = std::mt19937_64;

  explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0);

  RngStream child(std::uint64_t id) const;

  std::uint64_t seed() const { return seed_; }
  std::uint64_t key() const { return key_; }

  engine_type& engine() { return engine_; }

  /// Uniform on [0, 1).
  double uniform() { return uniform_(engine_); }
  double normal() { return normal_(engine_); }
  double normal(double mean, double sd) { return mean + sd * normal_(engine_); }
  double gamma(double shape, double scale);
  double chi_squared(double dof) { return gamma(0.5 * dof, 2.0); }
  double exponential(double rate);
  std::int64_t poisson(double mean);
  /// Number of failures before the first success, success probability p.
  std::int64_t geometric(double p);
  /// Failures before the k-th success.
  std::int64_t negative_binomial(std::int64_t k, double p);
  bool bernoulli(double p) { return uniform() < p; }
  std::size_t uniform_index(std::size_t n);

 private:
  std::uint64_t seed_;
  std::uint64_t key_;
  engine_type engine_;
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace evd
