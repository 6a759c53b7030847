#include "evd/models/ising.hpp"

#include <cmath>
#include <optional>

namespace evd {
namespace {

// Site-at-a-time transfer recursion. After processing s sites the state is the
// window of the last W spins, bit b holding site s-1-b (1 = +1). Bits of sites
// that do not exist yet are always 0 because the recursion starts from the
// single state 0.
class Transfer {
 public:
  Transfer(std::size_t rows, std::size_t cols, IsingOrder order, const Eigen::VectorXd& eta)
      : cols_(cols), order_(order), width_(order == IsingOrder::second ? cols + 1 : cols) {
    if (cols > kIsingMaxTransferCols)
      throw Unsupported("Ising transfer recursion supports at most 20 columns");
    (void)rows;
    const double e1 = eta[0];
    const double e2 = order == IsingOrder::second ? eta[1] : 0.0;
    for (int a = -2; a <= 2; ++a)
      for (int b = -2; b <= 2; ++b) {
        factor_[1][a + 2][b + 2] = std::exp(e1 * a + e2 * b);
        factor_[0][a + 2][b + 2] = std::exp(-(e1 * a + e2 * b));
      }
  }

  std::size_t states() const { return std::size_t{1} << width_; }

  // Local field counts (a: h/v neighbours, b: diagonal) of the site with
  // raster index s, given the window before it.
  void counts(std::size_t s, std::size_t mask, int& a, int& b) const {
    const std::size_t i = s / cols_, j = s % cols_;
    auto spin = [&](std::size_t bit) { return ((mask >> bit) & 1U) ? 1 : -1; };
    a = 0;
    b = 0;
    if (j > 0) a += spin(0);
    if (i > 0) a += spin(cols_ - 1);
    if (order_ == IsingOrder::second && i > 0) {
      if (j > 0) b += spin(cols_);
      if (j + 1 < cols_) b += spin(cols_ - 2);
    }
  }

  double factor(std::size_t s, std::size_t prev_mask, unsigned bit) const {
    int a, b;
    counts(s, prev_mask, a, b);
    return factor_[bit][a + 2][b + 2];
  }

  // One recursion step; returns the log of the normaliser applied.
  double step(std::size_t s, const std::vector<double>& cur, std::vector<double>& nxt) const {
    const std::size_t all = states() - 1;
    std::fill(nxt.begin(), nxt.end(), 0.0);
    for (std::size_t mask = 0; mask < cur.size(); ++mask) {
      const double c = cur[mask];
      if (c == 0.0) continue;
      int a, b;
      counts(s, mask, a, b);
      nxt[(mask << 1) & all] += c * factor_[0][a + 2][b + 2];
      nxt[((mask << 1) | 1U) & all] += c * factor_[1][a + 2][b + 2];
    }
    double total = 0.0;
    for (double v : nxt) total += v;
    for (double& v : nxt) v /= total;
    return std::log(total);
  }

  std::size_t width() const { return width_; }

 private:
  std::size_t cols_;
  IsingOrder order_;
  std::size_t width_;
  double factor_[2][5][5];
};

struct SamplerCache {
  std::size_t rows = 0, cols = 0, k = 0;
  IsingOrder order = IsingOrder::first;
  Eigen::VectorXd eta;
  std::vector<std::vector<double>> messages;
};

constexpr std::size_t kMaxStoredMessages = std::size_t{1} << 24;

}  // namespace

double ising_log_partition(std::size_t rows, std::size_t cols, IsingOrder order, const Eigen::VectorXd& eta,
                           std::size_t k) {
  if (k > rows * cols) throw ContractViolation("ising_log_partition: k exceeds site count");
  Transfer tr(rows, cols, order, eta);
  std::vector<double> cur(tr.states(), 0.0), nxt(tr.states());
  cur[0] = 1.0;
  double log_z = 0.0;
  for (std::size_t s = 0; s < k; ++s) {
    log_z += tr.step(s, cur, nxt);
    cur.swap(nxt);
  }
  return log_z;
}

double ising_exact_log_z(const ParameterVector& theta, std::size_t rows, std::size_t cols, IsingOrder order) {
  return ising_log_partition(rows, cols, order, theta, rows * cols);
}

IsingModel::IsingModel(std::size_t rows, std::size_t cols, IsingOrder order, double prior_lo, double prior_hi,
                       double stat_scale)
    : rows_(rows), cols_(cols), order_(order), prior_lo_(prior_lo), prior_hi_(prior_hi), stat_scale_(stat_scale) {
  if (rows == 0 || cols == 0) throw ContractViolation("Ising lattice must be non-empty");
  if (!(prior_hi > prior_lo)) throw ContractViolation("Ising prior bounds must satisfy lo < hi");
  if (!(stat_scale > 0.0)) throw ContractViolation("Ising statistic scale must be positive");
  neighbours_.resize(sites());
  auto link = [&](std::size_t a, std::size_t b, std::uint8_t kind) {
    neighbours_[a].push_back({static_cast<std::uint32_t>(b), kind});
    neighbours_[b].push_back({static_cast<std::uint32_t>(a), kind});
  };
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) {
      const std::size_t s = i * cols + j;
      if (j + 1 < cols) link(s, s + 1, 0);
      if (i + 1 < rows) link(s, s + cols, 0);
      if (order == IsingOrder::second && i + 1 < rows) {
        if (j + 1 < cols) link(s, s + cols + 1, 1);
        if (j > 0) link(s, s + cols - 1, 1);
      }
    }
}

double IsingModel::log_prior(const ParameterVector& theta) const {
  double lp = 0.0;
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    if (!(theta[i] > prior_lo_ && theta[i] < prior_hi_)) return kNegInf;
    lp -= std::log(prior_hi_ - prior_lo_);
  }
  return lp;
}

ParameterVector IsingModel::sample_prior(RngStream& rng) const {
  ParameterVector theta(dim());
  for (Eigen::Index i = 0; i < theta.size(); ++i) theta[i] = prior_lo_ + (prior_hi_ - prior_lo_) * rng.uniform();
  return theta;
}

Eigen::VectorXd IsingModel::stats(const Data& y, std::size_t k) const {
  if (k > sites() || y.sites() != sites()) throw ContractViolation("Ising stats: lattice / unit mismatch");
  Eigen::VectorXd s = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim()));
  for (std::size_t a = 0; a < k; ++a)
    for (const auto& n : neighbours_[a])
      if (n.site < a) s[n.kind] += static_cast<double>(y.spins[a] * y.spins[n.site]);
  return s;
}

double IsingModel::log_gamma(const Data& y, const ParameterVector& theta, std::size_t k) const {
  return natural(theta).dot(stats(y, k));
}

double IsingModel::exact_log_z(const ParameterVector& theta, std::size_t k) const {
  return ising_log_partition(rows_, cols_, order_, natural(theta), k);
}

IsingModel::Data IsingModel::simulate(const ParameterVector& theta, std::size_t k, RngStream& rng,
                                      const SimConfig& sim) const {
  return draw_natural(natural(theta), k, rng, sim);
}

IsingModel::Data IsingModel::draw_natural(const Eigen::VectorXd& eta, std::size_t k, RngStream& rng,
                                          const SimConfig& sim) const {
  Lattice u = blank();
  if (eta.isZero(0.0)) {
    for (std::size_t s = 0; s < k; ++s) u.spins[s] = rng.uniform() < 0.5 ? 1 : -1;
    return u;
  }
  if (sim.mode == SimMode::exact) return exact_sample(eta, k, rng);
  for (std::size_t s = 0; s < k; ++s) u.spins[s] = rng.uniform() < 0.5 ? 1 : -1;
  for (std::uint32_t b = 0; b < sim.burn_in; ++b) sweep_natural(u, eta, k, rng);
  return u;
}

double IsingModel::site_plus_probability(const Lattice& state, std::size_t site, const Eigen::VectorXd& eta,
                                         std::size_t k) const {
  double h = 0.0;
  for (const auto& n : neighbours_[site])
    if (n.site < k) h += eta[n.kind] * state.spins[n.site];
  return 1.0 / (1.0 + std::exp(-2.0 * h));
}

void IsingModel::sweep_natural(Data& u, const Eigen::VectorXd& eta, std::size_t k, RngStream& rng) const {
  // Heat-bath probabilities indexed by the two local neighbour sums.
  double plus[9][9];
  const double e2 = order_ == IsingOrder::second ? eta[1] : 0.0;
  for (int a = -4; a <= 4; ++a)
    for (int b = -4; b <= 4; ++b) plus[a + 4][b + 4] = 1.0 / (1.0 + std::exp(-2.0 * (eta[0] * a + e2 * b)));
  for (std::size_t s = 0; s < k; ++s) {
    int sum[2] = {0, 0};
    for (const auto& n : neighbours_[s])
      if (n.site < k) sum[n.kind] += u.spins[n.site];
    u.spins[s] = rng.uniform() < plus[sum[0] + 4][sum[1] + 4] ? 1 : -1;
  }
}

std::vector<Lattice> IsingModel::enumerate(std::size_t k) const {
  if (k > 20) throw Unsupported("Ising enumeration limited to 20 sites");
  std::vector<Lattice> out;
  out.reserve(std::size_t{1} << k);
  for (std::size_t code = 0; code < (std::size_t{1} << k); ++code) {
    Lattice l = blank();
    for (std::size_t s = 0; s < k; ++s) l.spins[s] = ((code >> s) & 1U) ? 1 : -1;
    out.push_back(std::move(l));
  }
  return out;
}

Lattice IsingModel::exact_sample(const Eigen::VectorXd& eta, std::size_t k, RngStream& rng) const {
  Transfer tr(rows_, cols_, order_, eta);
  if ((k + 1) * tr.states() > kMaxStoredMessages)
    throw Unsupported("exact Ising sampling: lattice too large, use Gibbs simulation");

  // Forward messages are reused while consecutive draws share (eta, k).
  thread_local SamplerCache cache;
  const bool hit = cache.rows == rows_ && cache.cols == cols_ && cache.k == k && cache.order == order_ &&
                   cache.eta.size() == eta.size() && cache.eta == eta && !cache.messages.empty();
  if (!hit) {
    cache.rows = rows_;
    cache.cols = cols_;
    cache.k = k;
    cache.order = order_;
    cache.eta = eta;
    cache.messages.assign(k + 1, std::vector<double>(tr.states(), 0.0));
    cache.messages[0][0] = 1.0;
    for (std::size_t s = 0; s < k; ++s) tr.step(s, cache.messages[s], cache.messages[s + 1]);
  }
  const auto& msg = cache.messages;

  Lattice out = blank();
  const std::size_t width = tr.width();
  // Final window.
  double u = rng.uniform();
  std::size_t mask = 0;
  {
    double acc = 0.0;
    const auto& last = msg[k];
    for (std::size_t m = 0; m < last.size(); ++m) {
      acc += last[m];
      mask = m;
      if (u < acc) break;
    }
  }
  for (std::size_t b = 0; b < width && b < k; ++b) out.spins[k - 1 - b] = ((mask >> b) & 1U) ? 1 : -1;
  // Backward: at step s the window covers sites s-W .. s-1; reveal site s-1-W.
  for (std::size_t s = k; s > width; --s) {
    const unsigned new_bit = mask & 1U;
    const std::size_t base = mask >> 1;
    const std::size_t hi = std::size_t{1} << (width - 1);
    const double w0 = msg[s - 1][base] * tr.factor(s - 1, base, new_bit);
    const double w1 = msg[s - 1][base | hi] * tr.factor(s - 1, base | hi, new_bit);
    const bool up = rng.uniform() * (w0 + w1) < w1;
    mask = up ? (base | hi) : base;
    out.spins[s - 1 - width] = up ? 1 : -1;
  }
  return out;
}

}  // namespace evd
