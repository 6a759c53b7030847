#include "evd/theory/flow.hpp"

#include <cmath>
#include <limits>

namespace evd {

void FiniteFlow::validate() const {
  const auto n = eta0.size();
  if (n == 0) throw ContractViolation("flow: empty state space");
  if (std::abs(eta0.sum() - 1.0) > 1e-12 || eta0.minCoeff() < 0.0)
    throw ContractViolation("flow: eta0 is not a probability vector");
  if (potentials.size() != kernels.size() || approx_potentials.size() != kernels.size())
    throw ContractViolation("flow: need one kernel and one potential pair per step");
  for (const auto& M : kernels) {
    if (M.rows() != n || M.cols() != n) throw ContractViolation("flow: kernel has the wrong shape");
    if (M.minCoeff() < 0.0) throw ContractViolation("flow: negative kernel entry");
    for (Eigen::Index i = 0; i < n; ++i)
      if (std::abs(M.row(i).sum() - 1.0) > 1e-12) throw ContractViolation("flow: kernel row does not sum to 1");
  }
  for (std::size_t t = 0; t < potentials.size(); ++t) {
    if (potentials[t].size() != n || approx_potentials[t].size() != n)
      throw ContractViolation("flow: potential has the wrong size");
    if (!(potentials[t].minCoeff() > 0.0) || !(approx_potentials[t].minCoeff() > 0.0))
      throw ContractViolation("flow: potentials must be strictly positive");
  }
}

Eigen::VectorXd boltzmann_gibbs(const Eigen::VectorXd& eta, const Eigen::VectorXd& G) {
  const Eigen::VectorXd w = eta.cwiseProduct(G);
  return w / w.sum();
}

double tv_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b) { return 0.5 * (a - b).cwiseAbs().sum(); }

FlowPaths flow_evolve(const FiniteFlow& flow) {
  flow.validate();
  FlowPaths out;
  out.exact.push_back(flow.eta0);
  out.approx.push_back(flow.eta0);
  for (std::size_t t = 0; t < flow.horizon(); ++t) {
    const auto& M = flow.kernels[t];
    out.exact.push_back((boltzmann_gibbs(out.exact.back(), flow.potentials[t]).transpose() * M).transpose());
    out.approx.push_back((boltzmann_gibbs(out.approx.back(), flow.approx_potentials[t]).transpose() * M).transpose());
  }
  return out;
}

MixingConstants measure_constants(const FiniteFlow& flow) {
  MixingConstants c;
  const auto n = static_cast<std::size_t>(flow.states());
  c.eps_M = std::numeric_limits<double>::infinity();
  c.eps_G = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < flow.horizon(); ++t) {
    const auto& G = flow.potentials[t];
    const auto& Gt = flow.approx_potentials[t];
    const auto& M = flow.kernels[t];
    for (std::size_t x = 0; x < n; ++x) {
      const double g = std::abs(G[x] - Gt[x]) / Gt[x];
      if (g > c.gamma_rel) {
        c.gamma_rel = g;
        c.gamma_t = t;
        c.gamma_x = x;
      }
      for (std::size_t y = 0; y < n; ++y) {
        const double rg = G[x] / G[y];
        if (rg < c.eps_G) {
          c.eps_G = rg;
          c.eps_G_t = t;
          c.eps_G_x = x;
          c.eps_G_y = y;
        }
        for (std::size_t z = 0; z < n; ++z) {
          const double rm = M(y, z) == 0.0 ? (M(x, z) == 0.0 ? 1.0 : std::numeric_limits<double>::infinity())
                                           : M(x, z) / M(y, z);
          if (rm < c.eps_M) {
            c.eps_M = rm;
            c.eps_M_t = t;
            c.eps_M_x = x;
            c.eps_M_y = y;
            c.eps_M_z = z;
          }
        }
      }
    }
  }
  if (flow.horizon() == 0) c.eps_M = c.eps_G = 1.0;
  return c;
}

Lemma1Result lemma1_check(const Eigen::VectorXd& eta, const Eigen::VectorXd& G, const Eigen::VectorXd& G_approx) {
  Lemma1Result r;
  double gamma = 0.0;
  for (Eigen::Index x = 0; x < G.size(); ++x) gamma = std::max(gamma, std::abs(G[x] - G_approx[x]) / G_approx[x]);
  r.tv = tv_distance(boltzmann_gibbs(eta, G_approx), boltzmann_gibbs(eta, G));
  r.bound = 2.0 * gamma;
  r.margin = r.bound - r.tv;
  r.holds = r.tv <= r.bound;
  return r;
}

Prop1Result prop1_check(const FiniteFlow& flow) {
  Prop1Result r;
  const auto paths = flow_evolve(flow);
  r.constants = measure_constants(flow);
  for (std::size_t t = 0; t < paths.exact.size(); ++t) {
    const double tv = tv_distance(paths.exact[t], paths.approx[t]);
    if (tv > r.sup_tv) {
      r.sup_tv = tv;
      r.sup_t = t;
    }
  }
  const double e = r.constants.eps_M;
  if (!(e > 0.0)) {
    r.vacuous = true;
    r.bound = std::numeric_limits<double>::infinity();
  } else {
    r.bound = 4.0 * r.constants.gamma_rel * (1.0 - e) / (e * e * e * r.constants.eps_G);
  }
  r.margin = r.bound - r.sup_tv;
  r.holds = r.sup_tv <= r.bound;
  return r;
}

FiniteFlow random_flow(const FlowGenerator& gen, RngStream& rng) {
  const auto n = static_cast<Eigen::Index>(gen.states);
  FiniteFlow f;
  f.eta0.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) f.eta0[i] = rng.exponential(1.0);
  f.eta0 /= f.eta0.sum();
  for (std::size_t t = 0; t < gen.horizon; ++t) {
    const double alpha = gen.alpha_lo + (gen.alpha_hi - gen.alpha_lo) * rng.uniform();
    Eigen::MatrixXd M(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) M(i, j) = rng.exponential(1.0);
      M.row(i) /= M.row(i).sum();
      M.row(i) = (1.0 - alpha) * M.row(i).array() + alpha / static_cast<double>(n);
      M.row(i) /= M.row(i).sum();
    }
    f.kernels.push_back(M);
    const double g = gen.gamma_lo + (gen.gamma_hi - gen.gamma_lo) * rng.uniform();
    Eigen::VectorXd G(n), Gt(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      G[i] = std::exp(gen.log_potential_band * (2.0 * rng.uniform() - 1.0));
      Gt[i] = G[i] * (1.0 + g * (2.0 * rng.uniform() - 1.0));
    }
    f.potentials.push_back(G);
    f.approx_potentials.push_back(Gt);
  }
  return f;
}

}  // namespace evd
