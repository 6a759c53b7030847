#pragma once

#include <cstdint>
#include <vector>

#include "evd/core/model.hpp"

namespace evd {

/// Undirected simple graph stored as a symmetric 0/1 adjacency matrix.
struct Graph {
  std::size_t nodes = 0;
  std::vector<std::uint8_t> adj;

  explicit Graph(std::size_t n = 0) : nodes(n), adj(n * n, 0) {}
  bool edge(std::size_t i, std::size_t j) const { return adj[i * nodes + j] != 0; }
  void set(std::size_t i, std::size_t j, bool on) {
    adj[i * nodes + j] = adj[j * nodes + i] = on ? 1 : 0;
  }
  std::size_t degree(std::size_t i) const;
  std::size_t dyads() const { return nodes * (nodes - 1) / 2; }
  bool operator==(const Graph&) const = default;
};

enum class ErgmStats { edges, edges_two_stars };

/// (#edges) or (#edges, #two-stars); two-stars are unordered paths of length 2.
Eigen::VectorXd ergm_stats(const Graph& g, ErgmStats which);

/// gamma(y|theta) = exp(theta' S(y)) over graphs on a fixed node set, with an
/// N(0, prior_var I) prior. The whole graph is a single unit; k = 0 is the
/// empty model.
class ErgmModel {
 public:
  using Data = Graph;
  static constexpr bool iid_units = false;

  ErgmModel(std::size_t nodes, ErgmStats which, double prior_var = 25.0);

  std::size_t nodes() const { return nodes_; }
  ErgmStats which() const { return which_; }

  std::size_t dim() const { return which_ == ErgmStats::edges ? 1 : 2; }
  std::size_t units(const Data&) const { return 1; }

  double log_prior(const ParameterVector& theta) const;
  ParameterVector sample_prior(RngStream& rng) const;
  double log_gamma(const Data& y, const ParameterVector& theta, std::size_t k) const;
  Data simulate(const ParameterVector& theta, std::size_t k, RngStream& rng, const SimConfig& sim) const;
  /// Closed form for the edges model; enumeration up to 20 dyads otherwise.
  double exact_log_z(const ParameterVector& theta, std::size_t k) const;
  SummaryVector summary(const Data& y) const { return ergm_stats(y, which_); }

  Eigen::VectorXd natural(const ParameterVector& theta) const { return theta; }
  Eigen::VectorXd stats(const Data& y, std::size_t k) const;
  double log_base(const Data&, std::size_t) const { return 0.0; }
  Data draw_natural(const Eigen::VectorXd& eta, std::size_t k, RngStream& rng, const SimConfig& sim) const;
  void sweep_natural(Data& u, const Eigen::VectorXd& eta, std::size_t k, RngStream& rng) const;
  double log_z_base(std::size_t k) const;

  /// Toggle every dyad (i < j, lexicographic) from its full conditional.
  void dyad_gibbs_sweep(Graph& g, const ParameterVector& theta, RngStream& rng) const;

  /// Exact draw: independent dyads for the edges model, enumeration otherwise.
  Graph exact_sample(const Eigen::VectorXd& eta, RngStream& rng) const;

  /// All graphs on the node set, indexed by dyad bit pattern (dyads <= 20).
  std::vector<Graph> enumerate() const;

 private:
  std::size_t nodes_;
  ErgmStats which_;
  double prior_var_;
};

}  // namespace evd
