#include "evd/models/ergm.hpp"

#include <cmath>
#include <numbers>

#include "evd/core/log_math.hpp"

namespace evd {
namespace {

constexpr std::size_t kMaxEnumDyads = 20;

double log1pexp(double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

}  // namespace

std::size_t Graph::degree(std::size_t i) const {
  std::size_t d = 0;
  for (std::size_t j = 0; j < nodes; ++j) d += adj[i * nodes + j];
  return d;
}

Eigen::VectorXd ergm_stats(const Graph& g, ErgmStats which) {
  double edges = 0.0, two_stars = 0.0;
  for (std::size_t i = 0; i < g.nodes; ++i) {
    const double deg = static_cast<double>(g.degree(i));
    edges += deg;
    two_stars += 0.5 * deg * (deg - 1.0);
  }
  edges *= 0.5;
  if (which == ErgmStats::edges) return Eigen::VectorXd::Constant(1, edges);
  Eigen::VectorXd s(2);
  s << edges, two_stars;
  return s;
}

ErgmModel::ErgmModel(std::size_t nodes, ErgmStats which, double prior_var)
    : nodes_(nodes), which_(which), prior_var_(prior_var) {
  if (nodes < 2) throw ContractViolation("ERGM needs at least two nodes");
  if (!(prior_var > 0.0)) throw ContractViolation("ERGM prior variance must be positive");
}

double ErgmModel::log_prior(const ParameterVector& theta) const {
  const double k = static_cast<double>(theta.size());
  return -0.5 * theta.squaredNorm() / prior_var_ - 0.5 * k * std::log(2.0 * std::numbers::pi * prior_var_);
}

ParameterVector ErgmModel::sample_prior(RngStream& rng) const {
  ParameterVector theta(static_cast<Eigen::Index>(dim()));
  for (Eigen::Index i = 0; i < theta.size(); ++i) theta[i] = rng.normal(0.0, std::sqrt(prior_var_));
  return theta;
}

Eigen::VectorXd ErgmModel::stats(const Data& y, std::size_t k) const {
  if (k > 1) throw ContractViolation("ERGM has a single unit");
  if (k == 0) return Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim()));
  return ergm_stats(y, which_);
}

double ErgmModel::log_gamma(const Data& y, const ParameterVector& theta, std::size_t k) const {
  return theta.dot(stats(y, k));
}

ErgmModel::Data ErgmModel::simulate(const ParameterVector& theta, std::size_t k, RngStream& rng,
                                    const SimConfig& sim) const {
  return draw_natural(theta, k, rng, sim);
}

double ErgmModel::log_z_base(std::size_t k) const {
  return k == 0 ? 0.0 : static_cast<double>(nodes_ * (nodes_ - 1) / 2) * std::log(2.0);
}

double ErgmModel::exact_log_z(const ParameterVector& theta, std::size_t k) const {
  if (k == 0) return 0.0;
  const double dyads = static_cast<double>(nodes_ * (nodes_ - 1) / 2);
  if (which_ == ErgmStats::edges) return dyads * log1pexp(theta[0]);
  const auto graphs = enumerate();
  std::vector<double> terms;
  terms.reserve(graphs.size());
  for (const auto& g : graphs) terms.push_back(theta.dot(ergm_stats(g, which_)));
  return log_sum_exp(terms);
}

void ErgmModel::dyad_gibbs_sweep(Graph& g, const ParameterVector& theta, RngStream& rng) const {
  sweep_natural(g, theta, 1, rng);
}

void ErgmModel::sweep_natural(Data& g, const Eigen::VectorXd& eta, std::size_t k, RngStream& rng) const {
  if (k == 0) return;
  std::vector<std::size_t> deg(nodes_);
  for (std::size_t i = 0; i < nodes_; ++i) deg[i] = g.degree(i);
  for (std::size_t i = 0; i < nodes_; ++i)
    for (std::size_t j = i + 1; j < nodes_; ++j) {
      const bool on = g.edge(i, j);
      // Change statistics for switching (i, j) on, other dyads held fixed.
      double h = eta[0];
      if (which_ == ErgmStats::edges_two_stars)
        h += eta[1] * static_cast<double>(deg[i] + deg[j] - (on ? 2 : 0));
      const bool next = rng.uniform() < 1.0 / (1.0 + std::exp(-h));
      if (next != on) {
        g.set(i, j, next);
        const std::size_t delta_sign = next ? 1 : static_cast<std::size_t>(-1);
        deg[i] += delta_sign;
        deg[j] += delta_sign;
      }
    }
}

ErgmModel::Data ErgmModel::draw_natural(const Eigen::VectorXd& eta, std::size_t k, RngStream& rng,
                                        const SimConfig& sim) const {
  if (k == 0) return Graph(nodes_);
  Graph g(nodes_);
  for (std::size_t i = 0; i < nodes_; ++i)
    for (std::size_t j = i + 1; j < nodes_; ++j) g.set(i, j, rng.uniform() < 0.5);
  if (eta.isZero(0.0)) return g;
  if (sim.mode == SimMode::exact) return exact_sample(eta, rng);
  for (std::uint32_t b = 0; b < sim.burn_in; ++b) sweep_natural(g, eta, 1, rng);
  return g;
}

Graph ErgmModel::exact_sample(const Eigen::VectorXd& eta, RngStream& rng) const {
  Graph g(nodes_);
  if (which_ == ErgmStats::edges) {
    const double p = 1.0 / (1.0 + std::exp(-eta[0]));
    for (std::size_t i = 0; i < nodes_; ++i)
      for (std::size_t j = i + 1; j < nodes_; ++j) g.set(i, j, rng.uniform() < p);
    return g;
  }
  const auto graphs = enumerate();
  std::vector<double> lw;
  lw.reserve(graphs.size());
  for (const auto& c : graphs) lw.push_back(eta.dot(ergm_stats(c, which_)));
  const double total = log_sum_exp(lw);
  double u = rng.uniform(), acc = 0.0;
  for (std::size_t i = 0; i < graphs.size(); ++i) {
    acc += std::exp(lw[i] - total);
    if (u < acc) return graphs[i];
  }
  return graphs.back();
}

std::vector<Graph> ErgmModel::enumerate() const {
  const std::size_t dyads = nodes_ * (nodes_ - 1) / 2;
  if (dyads > kMaxEnumDyads) throw Unsupported("ERGM enumeration limited to 20 dyads");
  std::vector<Graph> out;
  out.reserve(std::size_t{1} << dyads);
  for (std::size_t code = 0; code < (std::size_t{1} << dyads); ++code) {
    Graph g(nodes_);
    std::size_t bit = 0;
    for (std::size_t i = 0; i < nodes_; ++i)
      for (std::size_t j = i + 1; j < nodes_; ++j, ++bit) g.set(i, j, (code >> bit) & 1U);
    out.push_back(std::move(g));
  }
  return out;
}

}  // namespace evd
