#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>

#include "doctest.h"
#include "evd/core/log_math.hpp"
#include "evd/core/moments.hpp"
#include "evd/models/count_models.hpp"
#include "evd/models/dataset_io.hpp"
#include "evd/models/ergm.hpp"
#include "evd/models/ising.hpp"
#include "evd/models/precision.hpp"

using namespace evd;

namespace {

ParameterVector scalar(double v) { return ParameterVector::Constant(1, v); }

// Brute force log sum over all spin configurations of the full lattice.
double brute_log_z(std::size_t rows, std::size_t cols, double t1, double t2 = 0.0) {
  const std::size_t n = rows * cols;
  std::vector<double> terms;
  for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
    auto s = [&](std::size_t i, std::size_t j) { return (mask >> (i * cols + j)) & 1 ? 1.0 : -1.0; };
    double e1 = 0, e2 = 0;
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j) {
        if (j + 1 < cols) e1 += s(i, j) * s(i, j + 1);
        if (i + 1 < rows) e1 += s(i, j) * s(i + 1, j);
        if (i + 1 < rows && j + 1 < cols) e2 += s(i, j) * s(i + 1, j + 1);
        if (i + 1 < rows && j > 0) e2 += s(i, j) * s(i + 1, j - 1);
      }
    terms.push_back(t1 * e1 + t2 * e2);
  }
  return log_sum_exp(terms);
}

}  // namespace

TEST_CASE("poisson evidence examples") {
  CHECK(poisson_log_evidence({0, 0, 0}) == doctest::Approx(std::log(0.25)).epsilon(1e-14));
  CHECK(poisson_log_evidence({0}) == doctest::Approx(std::log(0.5)).epsilon(1e-14));
  CHECK(poisson_log_evidence({1, 2}) == doctest::Approx(std::log(1.0 / 27.0)).epsilon(1e-14));
  CHECK_THROWS_AS(poisson_log_evidence({1, -1}), DomainError);
}

TEST_CASE("geometric evidence examples") {
  CHECK(geometric_log_evidence({0, 0, 0}) == doctest::Approx(std::log(0.25)).epsilon(1e-14));
  CHECK(geometric_log_evidence({0}) == doctest::Approx(std::log(0.5)).epsilon(1e-14));
  CHECK(geometric_log_evidence({1, 2}) == doctest::Approx(std::log(1.0 / 60.0)).epsilon(1e-14));
  CHECK_THROWS_AS(geometric_log_evidence({-2}), DomainError);
}

TEST_CASE("count evidences agree with prior Monte Carlo") {
  RngStream rng(17);
  PoissonModel pm;
  GeometricModel gm;
  for (int ds = 0; ds < 20; ++ds) {
    Counts y(1 + rng.uniform_index(4));
    for (auto& v : y) v = rng.poisson(1.5);
    const std::size_t n = y.size();
    for (int which = 0; which < 2; ++which) {
      const int draws = 200000;
      std::vector<double> lik(draws);
      for (int i = 0; i < draws; ++i) {
        const auto th = which == 0 ? pm.sample_prior(rng) : gm.sample_prior(rng);
        lik[i] = which == 0 ? std::exp(pm.log_gamma(y, th, n) - pm.exact_log_z(th, n))
                            : std::exp(gm.log_gamma(y, th, n) - gm.exact_log_z(th, n));
      }
      const double m = mean(lik), se = std::sqrt(variance(lik) / draws);
      const double truth = std::exp(which == 0 ? poisson_log_evidence(y) : geometric_log_evidence(y));
      CHECK(std::abs(m - truth) < 4.0 * se);
    }
  }
}

TEST_CASE("count likelihoods normalise") {
  PoissonModel pm;
  GeometricModel gm;
  for (double th : {0.3, 2.0}) {
    double sp = 0, sg = 0;
    for (std::int64_t a = 0; a < 80; ++a)
      for (std::int64_t b = 0; b < 80; ++b) {
        sp += std::exp(pm.log_gamma({a, b}, scalar(th), 2) - pm.exact_log_z(scalar(th), 2));
        sg += std::exp(gm.log_gamma({a, b}, scalar(0.3 + th / 4), 2) - gm.exact_log_z(scalar(0.3 + th / 4), 2));
      }
    CHECK(sp == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(sg == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("count statistic draws match simulated sums") {
  PoissonModel pm;
  GeometricModel gm;
  RngStream rng(5);
  const int reps = 20000;
  const std::size_t k = 30;
  std::vector<double> a(reps), b(reps), c(reps), d(reps);
  for (int r = 0; r < reps; ++r) {
    a[r] = pm.draw_stats(pm.natural(scalar(0.7)), k, rng)[0];
    b[r] = pm.stats(pm.simulate(scalar(0.7), k, rng, SimConfig::exact()), k)[0];
    c[r] = gm.draw_stats(gm.natural(scalar(0.4)), k, rng)[0];
    d[r] = gm.stats(gm.simulate(scalar(0.4), k, rng, SimConfig::exact()), k)[0];
  }
  CHECK(std::abs(mean(a) - mean(b)) < 4.0 * std::sqrt((variance(a) + variance(b)) / reps));
  CHECK(std::abs(mean(c) - mean(d)) < 4.0 * std::sqrt((variance(c) + variance(d)) / reps));
  CHECK(variance(a) == doctest::Approx(variance(b)).epsilon(0.1));
  CHECK(variance(c) == doctest::Approx(variance(d)).epsilon(0.1));
}

TEST_CASE("table summaries match direct summaries in distribution") {
  PoissonModel pm;
  GeometricModel gm;
  RngStream rng(6);
  const std::size_t k = 20;
  const auto fast = pm.simulate_summaries(scalar(3.0), k, 20000, rng);
  const auto fastg = gm.simulate_summaries(scalar(0.3), k, 20000, rng);
  for (int comp = 0; comp < 2; ++comp) {
    std::vector<double> f, s, fg, sg;
    for (std::size_t r = 0; r < fast.size(); ++r) {
      f.push_back(fast[r][comp]);
      s.push_back(pm.summary(pm.simulate(scalar(3.0), k, rng, SimConfig::exact()))[comp]);
      fg.push_back(fastg[r][comp]);
      sg.push_back(gm.summary(gm.simulate(scalar(0.3), k, rng, SimConfig::exact()))[comp]);
    }
    CHECK(std::abs(mean(f) - mean(s)) < 4.0 * std::sqrt((variance(f) + variance(s)) / f.size()));
    CHECK(std::abs(mean(fg) - mean(sg)) < 4.0 * std::sqrt((variance(fg) + variance(sg)) / fg.size()));
  }
  // Summary is (sum y, sum log y!).
  const auto sm = pm.summary({0, 3, 1});
  CHECK(sm[0] == 4.0);
  CHECK(sm[1] == doctest::Approx(std::log(6.0)));
}

TEST_CASE("ising exact log Z examples") {
  CHECK(ising_exact_log_z(scalar(0.0), 2, 2, IsingOrder::first) == doctest::Approx(std::log(16.0)).epsilon(1e-14));
  double s = 0;
  for (int m = 0; m < 8; ++m) {
    const double y1 = m & 1 ? 1 : -1, y2 = m & 2 ? 1 : -1, y3 = m & 4 ? 1 : -1;
    s += std::exp(y1 * y2 + y2 * y3);
  }
  CHECK(ising_exact_log_z(scalar(1.0), 1, 3, IsingOrder::first) == doctest::Approx(std::log(s)).epsilon(1e-14));
  CHECK(std::abs(ising_exact_log_z(scalar(0.4), 4, 4, IsingOrder::first) - brute_log_z(4, 4, 0.4)) < 1e-10);
  ParameterVector t2(2);
  t2 << 0.3, -0.2;
  CHECK(std::abs(ising_exact_log_z(t2, 3, 4, IsingOrder::second) - brute_log_z(3, 4, 0.3, -0.2)) < 1e-10);
  CHECK(std::abs(ising_exact_log_z(scalar(0.2), 5, 3, IsingOrder::first) - brute_log_z(5, 3, 0.2)) < 1e-10);
  CHECK_THROWS_AS(ising_exact_log_z(scalar(0.1), 2, 21, IsingOrder::first), Unsupported);
}

TEST_CASE("ising prefix models normalise") {
  RngStream rng(8);
  for (auto order : {IsingOrder::first, IsingOrder::second}) {
    IsingModel m(3, 4, order, -1.0, 1.0);
    for (int rep = 0; rep < 10; ++rep) {
      const auto th = m.sample_prior(rng);
      for (std::size_t k : {1u, 5u, 7u, 12u}) {
        std::vector<double> terms;
        for (const auto& y : m.enumerate(k)) terms.push_back(m.log_gamma(y, th, k));
        CHECK(std::abs(log_sum_exp(terms) - m.exact_log_z(th, k)) < 1e-10);
      }
    }
  }
}

TEST_CASE("ising gibbs sweep leaves the exact law invariant") {
  for (auto order : {IsingOrder::first, IsingOrder::second}) {
    IsingModel m(2, 2, order, -1.0, 1.0);
    ParameterVector th = order == IsingOrder::first ? scalar(0.5) : ParameterVector(2);
    if (order == IsingOrder::second) th << 0.5, -0.3;
    const auto states = m.enumerate(4);
    const std::size_t S = states.size();
    Eigen::VectorXd pi(S);
    for (std::size_t i = 0; i < S; ++i) pi[i] = std::exp(m.log_gamma(states[i], th, 4) - m.exact_log_z(th, 4));
    Eigen::MatrixXd T = Eigen::MatrixXd::Identity(S, S);
    for (std::size_t site = 0; site < 4; ++site) {
      Eigen::MatrixXd K = Eigen::MatrixXd::Zero(S, S);
      for (std::size_t i = 0; i < S; ++i) {
        const double p = m.site_plus_probability(states[i], site, m.natural(th), 4);
        K(i, i | (std::size_t{1} << site)) += p;
        K(i, i & ~(std::size_t{1} << site)) += 1 - p;
      }
      T = T * K;
    }
    const Eigen::VectorXd out = (pi.transpose() * T).transpose();
    CHECK((out - pi).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("ising gibbs sweep empirical statistic") {
  IsingModel m(2, 2, IsingOrder::first, 0.0, 2.0);
  const auto th = scalar(0.5);
  double es = 0;
  for (const auto& y : m.enumerate(4)) es += m.stats(y, 4)[0] * std::exp(m.log_gamma(y, th, 4) - m.exact_log_z(th, 4));
  RngStream rng(3);
  auto state = m.simulate(th, 4, rng, SimConfig::gibbs(0));
  std::vector<double> chain;
  for (int i = 0; i < 100000; ++i) {
    m.gibbs_sweep(state, th, rng);
    chain.push_back(m.stats(state, 4)[0]);
  }
  CHECK(std::abs(mean(chain) - es) < 3.0 * batch_means_se(chain, 50));
}

TEST_CASE("ising zero coupling and single site") {
  RngStream rng(4);
  IsingModel m(3, 3, IsingOrder::first, 0.0, 2.0);
  auto state = m.simulate(scalar(0.0), 9, rng, SimConfig::gibbs(0));
  double plus = 0;
  const int reps = 20000;
  for (int i = 0; i < reps; ++i) {
    m.gibbs_sweep(state, scalar(0.0), rng);
    plus += state.spins[4] == 1 ? 1 : 0;
  }
  CHECK(std::abs(plus / reps - 0.5) < 4.0 * std::sqrt(0.25 / reps));
  IsingModel one(1, 1, IsingOrder::first, 0.0, 2.0);
  Lattice l = one.blank();
  l.spins[0] = 1;
  CHECK(one.site_plus_probability(l, 0, one.natural(scalar(1.7)), 1) == doctest::Approx(0.5));
}

TEST_CASE("ising exact sampler matches enumeration") {
  RngStream rng(12);
  for (auto order : {IsingOrder::first, IsingOrder::second}) {
    IsingModel m(3, 3, order, -1.0, 1.0);
    ParameterVector th = order == IsingOrder::first ? scalar(0.4) : ParameterVector(2);
    if (order == IsingOrder::second) th << 0.4, -0.25;
    for (std::size_t k : {9u, 5u}) {
      const auto states = m.enumerate(k);
      std::map<std::vector<std::int8_t>, double> prob;
      for (const auto& y : states) prob[y.spins] = std::exp(m.log_gamma(y, th, k) - m.exact_log_z(th, k));
      std::map<std::vector<std::int8_t>, int> count;
      const int draws = 200000;
      for (int i = 0; i < draws; ++i) ++count[m.simulate(th, k, rng, SimConfig::exact()).spins];
      CHECK(count.size() <= prob.size());
      double chi2 = 0;
      for (const auto& [s, p] : prob) {
        const double e = p * draws;
        const double o = count.count(s) ? count[s] : 0;
        chi2 += (o - e) * (o - e) / e;
      }
      const double dof = static_cast<double>(prob.size() - 1);
      CHECK(chi2 < dof + 5.0 * std::sqrt(2.0 * dof));
    }
  }
}

TEST_CASE("ising simulate is reproducible") {
  IsingModel m(6, 6, IsingOrder::first, 0.0, 1.0);
  RngStream a(77), b(77);
  CHECK(m.simulate(scalar(0.3), 36, a, SimConfig::gibbs(5)) == m.simulate(scalar(0.3), 36, b, SimConfig::gibbs(5)));
  RngStream c(78), d(78);
  CHECK(m.simulate(scalar(0.3), 36, c, SimConfig::exact()) == m.simulate(scalar(0.3), 36, d, SimConfig::exact()));
}

TEST_CASE("precision evidence examples") {
  const Eigen::MatrixXd I1 = Eigen::MatrixXd::Identity(1, 1);
  const Vectors y0{Eigen::VectorXd::Zero(1)};
  const double expect = std::lgamma(6.0) - std::lgamma(5.5) - 0.5 * std::log(M_PI);
  CHECK(gaussian_precision_log_evidence(y0, 11.0, I1) == doctest::Approx(expect).epsilon(1e-13));
  CHECK(gaussian_precision_log_evidence({}, 11.0, I1) == 0.0);
  CHECK_THROWS_AS(gaussian_precision_log_evidence(y0, 11.0, Eigen::MatrixXd::Zero(1, 1)), DomainError);
}

TEST_CASE("precision d=1 evidence matches quadrature of the Cholesky-parameterised integrand") {
  RngStream rng(21);
  using boost::math::quadrature::gauss_kronrod;
  for (int rep = 0; rep < 10; ++rep) {
    const double nu = 2.0 + 10.0 * rng.uniform();
    Eigen::MatrixXd V(1, 1);
    V(0, 0) = 0.2 + 2.0 * rng.uniform();
    GaussianPrecisionModel m(1, nu, V);
    Vectors y;
    const std::size_t n = 1 + rng.uniform_index(6);
    for (std::size_t i = 0; i < n; ++i) y.push_back(Eigen::VectorXd::Constant(1, 1.5 * rng.normal()));
    auto f = [&](double a) {
      const auto th = scalar(a);
      return std::exp(m.log_prior(th) + m.log_gamma(y, th, n) - m.exact_log_z(th, n));
    };
    const double q = gauss_kronrod<double, 61>::integrate(f, 0.0, std::numeric_limits<double>::infinity(), 15, 1e-13);
    CHECK(std::abs(std::log(q) - gaussian_precision_log_evidence(y, nu, V)) < 1e-6);
    auto prior = [&](double a) { return std::exp(m.log_prior(scalar(a))); };
    CHECK(gauss_kronrod<double, 61>::integrate(prior, 0.0, std::numeric_limits<double>::infinity(), 15, 1e-13) ==
          doctest::Approx(1.0).epsilon(1e-8));
  }
}

TEST_CASE("precision d=2 evidence matches Monte Carlo over the prior") {
  RngStream rng(22);
  GaussianPrecisionModel m(2);
  Vectors y;
  for (int i = 0; i < 3; ++i) y.push_back(Eigen::VectorXd::Random(2));
  const int draws = 400000;
  std::vector<double> lik(draws);
  for (int i = 0; i < draws; ++i) {
    const auto th = m.sample_prior(rng);
    lik[i] = std::exp(m.log_gamma(y, th, 3) - m.exact_log_z(th, 3));
  }
  const double truth = std::exp(gaussian_precision_log_evidence(y, m.nu(), m.V()));
  CHECK(std::abs(mean(lik) - truth) < 4.0 * std::sqrt(variance(lik) / draws));
}

TEST_CASE("precision parameterisation and support") {
  Eigen::MatrixXd L(3, 3);
  L << 1.0, 0, 0, 0.2, 2.0, 0, -0.3, 0.4, 0.5;
  CHECK(cholesky_from_theta(theta_from_cholesky(L), 3).isApprox(L));
  GaussianPrecisionModel m(3);
  auto th = theta_from_cholesky(L);
  CHECK(std::isfinite(m.log_prior(th)));
  th[2] = -0.1;  // a_11
  CHECK(m.log_prior(th) == kNegInf);
  const auto tgt = m.make_log_target({Eigen::VectorXd::Ones(3)}, 1);
  CHECK(tgt(th) == kNegInf);
}

TEST_CASE("precision log target differs from prior + likelihood by a constant") {
  GaussianPrecisionModel m(3);
  RngStream rng(5);
  Vectors y;
  for (int i = 0; i < 6; ++i) y.push_back(Eigen::VectorXd::Random(3));
  const auto tgt = m.make_log_target(y, 4);
  std::vector<double> diff;
  for (int i = 0; i < 20; ++i) {
    const auto th = m.sample_prior(rng);
    diff.push_back(tgt(th) - (m.log_prior(th) + m.log_gamma(y, th, 4) - m.exact_log_z(th, 4)));
  }
  for (double d : diff) CHECK(d == doctest::Approx(diff[0]).epsilon(1e-10));
}

TEST_CASE("precision simulate has the right covariance") {
  GaussianPrecisionModel m(2);
  Eigen::MatrixXd L(2, 2);
  L << 2.0, 0.0, 0.5, 1.0;
  const auto th = theta_from_cholesky(L);
  RngStream rng(9);
  const auto y = m.simulate(th, 200000, rng, SimConfig::exact());
  const Eigen::MatrixXd S = scatter(y, y.size()) / static_cast<double>(y.size());
  const Eigen::MatrixXd Sigma = (L * L.transpose()).inverse();
  CHECK((S - Sigma).cwiseAbs().maxCoeff() < 0.01);
  CHECK(precision_mle(y).isApprox(S.inverse()));
}

TEST_CASE("gaussian unit auxiliary density") {
  Eigen::MatrixXd P(2, 2);
  P << 2.0, 0.3, 0.3, 1.0;
  GaussianUnitAux q(P);
  Vectors u{Eigen::Vector2d(0.1, -0.4), Eigen::Vector2d(1.0, 0.5)};
  const Eigen::MatrixXd Sigma = P.inverse();
  double expect = 0;
  for (const auto& x : u)
    expect += -0.5 * x.dot(P * x) - 0.5 * std::log((2 * M_PI * Sigma).determinant());
  CHECK(q.log_density(u, 0, 2) == doctest::Approx(expect).epsilon(1e-13));
  CHECK(q.log_density(u, 1, 2) == doctest::Approx(-0.5 * u[1].dot(P * u[1]) - 0.5 * std::log((2 * M_PI * Sigma).determinant())));
}

TEST_CASE("ergm statistic examples") {
  Graph g(3);
  CHECK(ergm_stats(g, ErgmStats::edges_two_stars) == Eigen::Vector2d(0, 0));
  g.set(0, 1, true);
  g.set(1, 2, true);
  g.set(0, 2, true);
  CHECK(ergm_stats(g, ErgmStats::edges_two_stars) == Eigen::Vector2d(3, 3));
  Graph star(4);
  star.set(0, 1, true);
  star.set(0, 2, true);
  star.set(0, 3, true);
  CHECK(ergm_stats(star, ErgmStats::edges_two_stars) == Eigen::Vector2d(3, 3));
}

TEST_CASE("ergm normalisers by enumeration") {
  RngStream rng(2);
  for (auto which : {ErgmStats::edges, ErgmStats::edges_two_stars}) {
    ErgmModel m(5, which);
    for (int rep = 0; rep < 10; ++rep) {
      const auto th = m.sample_prior(rng) * 0.1;
      std::vector<double> terms;
      for (const auto& g : m.enumerate()) terms.push_back(m.log_gamma(g, th, 1));
      CHECK(std::abs(log_sum_exp(terms) - m.exact_log_z(th, 1)) < 1e-10);
    }
  }
}

TEST_CASE("ergm zero-parameter sweep gives fair dyads") {
  ErgmModel m(6, ErgmStats::edges_two_stars);
  RngStream rng(1);
  Graph g(6);
  double on = 0;
  const int reps = 20000;
  for (int i = 0; i < reps; ++i) {
    m.dyad_gibbs_sweep(g, Eigen::Vector2d(0, 0), rng);
    on += g.edge(1, 4) ? 1 : 0;
  }
  CHECK(std::abs(on / reps - 0.5) < 4.0 * std::sqrt(0.25 / reps));
}

TEST_CASE("ergm dyad gibbs targets the exact two-star law") {
  ErgmModel m(5, ErgmStats::edges_two_stars);
  const Eigen::Vector2d th(-0.5, 0.15);
  double es = 0;
  const double lz = m.exact_log_z(th, 1);
  for (const auto& g : m.enumerate()) es += ergm_stats(g, m.which())[1] * std::exp(m.log_gamma(g, th, 1) - lz);
  RngStream rng(4);
  Graph g(5);
  std::vector<double> chain;
  for (int i = 0; i < 100000; ++i) {
    m.dyad_gibbs_sweep(g, th, rng);
    chain.push_back(ergm_stats(g, m.which())[1]);
  }
  CHECK(std::abs(mean(chain) - es) < 3.5 * batch_means_se(chain, 50));
}

TEST_CASE("dataset files round trip") {
  const auto dir = std::filesystem::temp_directory_path() / "evd_io_test";
  std::filesystem::create_directories(dir);
  IsingModel im(3, 4, IsingOrder::first);
  RngStream rng(3);
  const auto l = im.simulate(scalar(0.3), 12, rng, SimConfig::exact());
  write_lattice((dir / "l.csv").string(), l);
  CHECK(read_lattice((dir / "l.csv").string()) == l);
  Graph g(5);
  g.set(0, 3, true);
  g.set(2, 4, true);
  write_graph((dir / "g.csv").string(), g);
  CHECK(read_graph((dir / "g.csv").string()) == g);
  Vectors v{Eigen::Vector2d(0.125, -3.5), Eigen::Vector2d(1e-7, 2.0)};
  write_vectors((dir / "v.csv").string(), v);
  const auto v2 = read_vectors((dir / "v.csv").string());
  REQUIRE(v2.size() == 2);
  CHECK(v2[0] == v[0]);
  CHECK(v2[1] == v[1]);
  const Counts c{0, 4, 17};
  write_counts((dir / "c.csv").string(), c);
  CHECK(read_counts((dir / "c.csv").string()) == c);
  std::filesystem::remove_all(dir);
}
