#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "evd/core/model.hpp"

namespace evd {

enum class IsingOrder { first, second };

/// Spin configuration in raster order. Spins are -1/+1; sites outside the
/// active prefix hold 0.
struct Lattice {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::int8_t> spins;

  std::size_t sites() const { return rows * cols; }
  std::int8_t at(std::size_t i, std::size_t j) const { return spins[i * cols + j]; }
  bool operator==(const Lattice&) const = default;
};

inline constexpr std::size_t kIsingMaxTransferCols = 20;

/// Free-boundary Ising model on a rows x cols lattice:
/// gamma(y|theta) = exp(eta' S(y)), eta = theta / stat_scale,
/// S_1 = sum of horizontal + vertical neighbour products,
/// S_2 = sum of diagonal neighbour products (second order only).
///
/// Data-point tempering adds sites in raster order; every statistic, sweep and
/// normaliser with unit count k refers to the sub-lattice of the first k
/// sites and the edges among them.
class IsingModel {
 public:
  using Data = Lattice;
  static constexpr bool iid_units = false;

  IsingModel(std::size_t rows, std::size_t cols, IsingOrder order, double prior_lo = 0.0, double prior_hi = 2.0,
             double stat_scale = 1.0);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t sites() const { return rows_ * cols_; }
  IsingOrder order() const { return order_; }

  std::size_t dim() const { return order_ == IsingOrder::first ? 1 : 2; }
  std::size_t units(const Data& y) const { return y.sites(); }

  /// Independent Unif(prior_lo, prior_hi) on each component.
  double log_prior(const ParameterVector& theta) const;
  ParameterVector sample_prior(RngStream& rng) const;
  double log_gamma(const Data& y, const ParameterVector& theta, std::size_t k) const;
  Data simulate(const ParameterVector& theta, std::size_t k, RngStream& rng, const SimConfig& sim) const;
  /// Transfer recursion; throws Unsupported when cols exceeds the limit.
  double exact_log_z(const ParameterVector& theta, std::size_t k) const;
  SummaryVector summary(const Data& y) const { return stats(y, y.sites()); }

  Eigen::VectorXd natural(const ParameterVector& theta) const { return theta / stat_scale_; }
  Eigen::VectorXd stats(const Data& y, std::size_t k) const;
  double log_base(const Data&, std::size_t) const { return 0.0; }
  Data draw_natural(const Eigen::VectorXd& eta, std::size_t k, RngStream& rng, const SimConfig& sim) const;
  void sweep_natural(Data& u, const Eigen::VectorXd& eta, std::size_t k, RngStream& rng) const;
  double log_z_base(std::size_t k) const { return static_cast<double>(k) * std::log(2.0); }

  /// One raster-order sweep of single-site heat-bath updates over the first k sites.
  void gibbs_sweep(Lattice& state, const ParameterVector& theta, RngStream& rng) const {
    sweep_natural(state, natural(theta), state.sites(), rng);
  }

  /// P(spin at `site` = +1 | all other active spins) at natural parameter eta.
  double site_plus_probability(const Lattice& state, std::size_t site, const Eigen::VectorXd& eta,
                               std::size_t k) const;

  /// All 2^k configurations of the first k sites (k <= 20), raster order,
  /// bit i of the index giving site i (1 -> +1).
  std::vector<Lattice> enumerate(std::size_t k) const;

  /// Exact draw of the first k sites by forward filtering / backward sampling
  /// through the transfer recursion.
  Lattice exact_sample(const Eigen::VectorXd& eta, std::size_t k, RngStream& rng) const;

  Lattice blank() const { return Lattice{rows_, cols_, std::vector<std::int8_t>(sites(), 0)}; }

 private:
  struct Neighbour {
    std::uint32_t site;
    std::uint8_t kind;  // 0: horizontal / vertical, 1: diagonal
  };

  std::size_t rows_, cols_;
  IsingOrder order_;
  double prior_lo_, prior_hi_, stat_scale_;
  std::vector<std::vector<Neighbour>> neighbours_;
};

/// log sum_y exp(eta' S(y)) over the first k sites of a rows x cols lattice,
/// by a site-at-a-time transfer recursion over a (cols + 1)-spin boundary.
/// eta has one (first order) or two (second order) entries.
double ising_log_partition(std::size_t rows, std::size_t cols, IsingOrder order, const Eigen::VectorXd& eta,
                           std::size_t k);

/// exact log Z(theta) of the full lattice (cols <= 20).
double ising_exact_log_z(const ParameterVector& theta, std::size_t rows, std::size_t cols, IsingOrder order);

}  // namespace evd
