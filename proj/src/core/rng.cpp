#include "evd/core/rng.hpp"

namespace evd {
namespace {

// SplitMix64 finaliser; used only to derive well-separated engine keys.
std::uint64_t mix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::mt19937_64 make_engine(std::uint64_t key) {
  std::seed_seq seq{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32),
                    static_cast<std::uint32_t>(mix(key)), static_cast<std::uint32_t>(mix(key) >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed), key_(mix(mix(seed) ^ (stream * 0xd1b54a32d192ed03ULL))), engine_(make_engine(key_)) {}

RngStream RngStream::child(std::uint64_t id) const {
  RngStream c(*this);
  c.key_ = mix(key_ ^ mix(id + 0x632be59bd9b4e019ULL));
  c.engine_ = make_engine(c.key_);
  c.uniform_.reset();
  c.normal_.reset();
  return c;
}

double RngStream::gamma(double shape, double scale) {
  return std::gamma_distribution<double>(shape, scale)(engine_);
}

double RngStream::exponential(double rate) { return std::exponential_distribution<double>(rate)(engine_); }

std::int64_t RngStream::poisson(double mean) {
  if (mean <= 0.0) return 0;
  return std::poisson_distribution<std::int64_t>(mean)(engine_);
}

std::int64_t RngStream::geometric(double p) {
  if (p >= 1.0) return 0;
  return std::geometric_distribution<std::int64_t>(p)(engine_);
}

std::int64_t RngStream::negative_binomial(std::int64_t k, double p) {
  if (p >= 1.0 || k <= 0) return 0;
  return std::negative_binomial_distribution<std::int64_t>(k, p)(engine_);
}

std::size_t RngStream::uniform_index(std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
}

}  // namespace evd
