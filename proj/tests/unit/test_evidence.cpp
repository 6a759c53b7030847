#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "evd/core/moments.hpp"
#include "evd/evidence/estimators.hpp"
#include "evd/models/count_models.hpp"
#include "evd/models/ising.hpp"
#include "evd/zratio/auxiliary.hpp"

using namespace evd;
using boost::math::quadrature::gauss_kronrod;

namespace {

ParameterVector scalar(double v) { return ParameterVector::Constant(1, v); }

IsProposal point_mass(double v) {
  return IsProposal("point", [v](RngStream&) { return scalar(v); }, [](const ParameterVector&) { return 0.0; });
}

// Gamma(shape, rate) proposal on lambda.
IsProposal gamma_proposal(double shape, double rate) {
  return IsProposal(
      "gamma", [=](RngStream& r) { return scalar(r.gamma(shape, 1.0 / rate)); },
      [=](const ParameterVector& t) {
        if (!(t[0] > 0.0)) return kNegInf;
        return shape * std::log(rate) - std::lgamma(shape) + (shape - 1) * std::log(t[0]) - rate * t[0];
      });
}

// Approximate standard error of a log IS estimate from its ESS.
double log_se(const RunReport& r) {
  return std::sqrt(std::max(0.0, static_cast<double>(r.particles) / r.ess - 1.0) / static_cast<double>(r.particles));
}

double ising_quadrature_log_evidence(const IsingModel& m, const Lattice& y) {
  const double S = m.stats(y, y.sites())[0];
  const double ref = m.exact_log_z(scalar(1.0), y.sites());
  auto f = [&](double t) { return 0.5 * std::exp(t * S - m.exact_log_z(scalar(t), y.sites()) + ref - S); };
  return std::log(gauss_kronrod<double, 61>::integrate(f, 0.0, 2.0, 12, 1e-14)) - ref + S;
}

}  // namespace

TEST_CASE("ideal IS with the posterior as proposal has constant weights") {
  PoissonModel pm;
  const Counts y{2, 0, 3, 1, 1};
  RngStream rng(1);
  const auto rep = ideal_is_log_evidence(pm, y, gamma_proposal(1.0 + 7.0, 1.0 + 5.0), 200, rng);
  CHECK(rep.ess == doctest::Approx(200.0).epsilon(1e-10));
  CHECK(rep.log_evidence == doctest::Approx(poisson_log_evidence(y)).epsilon(1e-12));
  CHECK(rep.bias == BiasClass::exact);
}

TEST_CASE("ideal IS on the Poisson toy") {
  PoissonModel pm;
  const Counts y{4, 2, 5, 3, 3, 6, 1, 2, 4, 3};
  RngStream rng(2);
  const auto rep = ideal_is_log_evidence(pm, y, IsProposal::prior(pm), 10000, rng);
  CHECK(std::abs(rep.log_evidence - poisson_log_evidence(y)) < 3.0 * log_se(rep));
  CHECK(rep.ess >= 1.0);
  CHECK(rep.ess <= 10000.0);
}

TEST_CASE("ideal IS with a single particle is that particle's weight") {
  PoissonModel pm;
  const Counts y{1, 2};
  RngStream rng(3);
  const auto q = IsProposal::prior(pm);
  const auto rep = ideal_is_log_evidence(pm, y, q, 1, rng);
  RngStream r = rng.child(0);
  const auto th = q.sample(r);
  CHECK(rep.log_evidence == doctest::Approx(pm.log_gamma(y, th, 2) - pm.exact_log_z(th, 2)).epsilon(1e-14));
  CHECK(rep.ess == 1.0);
}

TEST_CASE("SAVIS with q_u equal to the likelihood reduces to ideal IS") {
  IsingModel m(3, 3, IsingOrder::first);
  RngStream rng(4);
  const auto y = m.simulate(scalar(0.5), 9, rng, SimConfig::exact());
  const auto q = point_mass(0.7);
  ModelAux<IsingModel> qu(m, scalar(0.7), 9, m.exact_log_z(scalar(0.7), 9));
  const auto a = savis_log_evidence(m, y, q, 20, 5, qu, SimConfig::exact(), rng);
  const auto b = ideal_is_log_evidence(m, y, q, 20, rng);
  CHECK(a.log_evidence == doctest::Approx(b.log_evidence).epsilon(1e-12));
  CHECK(a.bias == BiasClass::unbiased);
  CHECK(a.sweeps == 20 * 5);
}

TEST_CASE("MAVIS with K = 0 reduces to SAVIS with q_u = f(.|theta_hat)") {
  IsingModel m(3, 3, IsingOrder::first);
  RngStream rng(5);
  const auto y = m.simulate(scalar(0.5), 9, rng, SimConfig::exact());
  const auto q = IsProposal::gaussian(scalar(0.5), Eigen::MatrixXd::Constant(1, 1, 0.04));
  const double lz = m.exact_log_z(scalar(0.6), 9);
  ModelAux<IsingModel> qu(m, scalar(0.6), 9, lz);
  for (auto sim : {SimConfig::exact(), SimConfig::gibbs(3)}) {
    const auto a = mavis_log_evidence(m, y, q, 30, AisPath{0, 4}, scalar(0.6), lz, sim, rng);
    const auto b = savis_log_evidence(m, y, q, 30, 4, qu, sim, rng);
    CHECK(a.log_evidence == doctest::Approx(b.log_evidence).epsilon(1e-12));
    CHECK(a.sweeps == b.sweeps);
  }
}

TEST_CASE("SAVIS on 4x4 Ising matches the quadrature oracle") {
  IsingModel m(4, 4, IsingOrder::first, 0.0, 2.0);
  RngStream rng(6);
  const auto y = m.simulate(scalar(0.4), 16, rng, SimConfig::exact());
  const double truth = ising_quadrature_log_evidence(m, y);
  // Posterior moments by quadrature for the proposal.
  const double S = m.stats(y, 16)[0];
  auto post = [&](double t) { return std::exp(t * S - m.exact_log_z(scalar(t), 16) - truth); };
  const double mu = gauss_kronrod<double, 61>::integrate([&](double t) { return t * post(t); }, 0.0, 2.0, 12, 1e-12) / 2.0;
  const double m2 = gauss_kronrod<double, 61>::integrate([&](double t) { return t * t * post(t); }, 0.0, 2.0, 12, 1e-12) / 2.0;
  const auto q = IsProposal::gaussian(scalar(mu), Eigen::MatrixXd::Constant(1, 1, 2.0 * (m2 - mu * mu)));
  ModelAux<IsingModel> qu(m, scalar(mu), 16, m.exact_log_z(scalar(mu), 16));
  std::vector<double> est;
  for (int r = 0; r < 50; ++r) {
    RngStream rr = rng.child(100 + r);
    est.push_back(savis_log_evidence(m, y, q, 200, 20, qu, SimConfig::exact(), rr).log_evidence);
  }
  CHECK(std::abs(mean(est) - truth) < 0.1);
}

TEST_CASE("SAVIS and MAVIS agree in distribution with ideal IS") {
  PoissonModel pm;
  const Counts y{3, 1, 4, 1, 5, 2, 2, 0, 3, 4};
  const auto q = gamma_proposal(20.0, 9.0);
  const double lz_hat = pm.exact_log_z(scalar(2.4), 10);
  ModelAux<PoissonModel> qu(pm, scalar(2.4), 10, lz_hat);
  std::vector<double> ideal, sav, mav;
  for (int r = 0; r < 200; ++r) {
    RngStream a(1000 + r), b(1000 + r), c(1000 + r);
    ideal.push_back(std::exp(ideal_is_log_evidence(pm, y, q, 50, a).log_evidence));
    sav.push_back(std::exp(savis_log_evidence(pm, y, q, 50, 5, qu, SimConfig::exact(), b).log_evidence));
    mav.push_back(std::exp(mavis_log_evidence(pm, y, q, 50, AisPath{10, 1}, scalar(2.4), lz_hat, SimConfig::exact(), c).log_evidence));
  }
  const double se_is = std::sqrt((variance(ideal) + variance(sav)) / 200.0);
  const double se_mav = std::sqrt((variance(ideal) + variance(mav)) / 200.0);
  CHECK(std::abs(mean(ideal) - mean(sav)) < 3.0 * se_is);
  CHECK(std::abs(mean(ideal) - mean(mav)) < 3.0 * se_mav);
}

TEST_CASE("MAVIS with a far-off theta_hat degrades without failing") {
  PoissonModel pm;
  const Counts y{3, 1, 4, 1, 5};
  RngStream rng(7);
  const auto rep = mavis_log_evidence(pm, y, IsProposal::prior(pm), 200, AisPath{2, 1}, scalar(40.0),
                                      pm.exact_log_z(scalar(40.0), 5), SimConfig::exact(), rng);
  CHECK(rep.ess >= 1.0);
  CHECK(rep.ess < 50.0);
}

TEST_CASE("ABC-IS kernel saturation, single simulation and monotonicity") {
  PoissonModel pm;
  const Counts y{3, 1, 4, 1, 5};
  RngStream rng(8);
  const auto sat = abc_is_log_marginal(pm, y, IsProposal::prior(pm), 100, AbcConfig{1e300, 5}, SimConfig::exact(), rng);
  CHECK(sat.log_evidence == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(sat.summary_marginal);
  CHECK(sat.bias == BiasClass::biased);
  double prev = 0.0;
  for (double eps : {10.0, 1.0, 0.5, 0.2, 0.1}) {
    RngStream r(9);
    const auto rep = abc_is_log_marginal(pm, y, IsProposal::prior(pm), 500, AbcConfig{eps, 20}, SimConfig::exact(), r);
    CHECK(rep.log_evidence <= prev + 1e-12);
    prev = rep.log_evidence;
  }
  CHECK_THROWS_AS(abc_is_log_marginal(pm, y, IsProposal::prior(pm), 10, AbcConfig{0.0, 5}, SimConfig::exact(), rng),
                  ContractViolation);
}

TEST_CASE("ABC distance uses relative scaling with a unit fallback") {
  SummaryVector obs(2), s(2);
  obs << 10.0, 0.0;
  s << 12.0, 0.05;
  CHECK(abc_distance(s, obs) == doctest::Approx(0.2));
  s << 10.5, 0.4;
  CHECK(abc_distance(s, obs) == doctest::Approx(0.4));
}

TEST_CASE("ABC-IS with one simulation is a single indicator") {
  PoissonModel pm;
  const Counts y{3, 1, 4};
  RngStream rng(10);
  const auto rep = abc_is_log_marginal(pm, y, point_mass(2.0), 50, AbcConfig{0.3, 1}, SimConfig::exact(), rng);
  // Each weight is p(2)/q(2) = e^-2 times a 0/1 indicator.
  const double frac = std::exp(rep.log_evidence + 2.0);
  CHECK(std::abs(frac * 50 - std::round(frac * 50)) < 1e-9);
  CHECK(rep.zero_weights == 50 - static_cast<std::size_t>(std::round(frac * 50)));
}

TEST_CASE("synthetic likelihood at the mode and with singular covariance") {
  std::vector<SummaryVector> sims;
  RngStream rng(11);
  for (int i = 0; i < 50; ++i) sims.push_back(Eigen::Vector2d(rng.normal(), 2.0 * rng.normal() + 1.0));
  Eigen::Vector2d mu = Eigen::Vector2d::Zero();
  for (const auto& s : sims) mu += s;
  mu /= 50.0;
  Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
  for (const auto& s : sims) cov += (s - mu) * (s - mu).transpose();
  cov /= 49.0;
  double ll = 0;
  REQUIRE(synthetic_log_likelihood(sims, mu, ll));
  CHECK(ll == doctest::Approx(-0.5 * std::log((2.0 * std::numbers::pi * cov).determinant())).epsilon(1e-12));
  std::vector<SummaryVector> same(10, Eigen::Vector2d(1.0, 2.0));
  CHECK_FALSE(synthetic_log_likelihood(same, Eigen::Vector2d(1.0, 2.0), ll));
}

TEST_CASE("SL-IS counts singular particles and flags the estimate") {
  PoissonModel pm;
  const Counts y{0, 0, 0};
  RngStream rng(12);
  const auto rep = sl_is_log_marginal(pm, y, point_mass(1e-300), 20, SlConfig{10}, SimConfig::exact(), rng);
  CHECK(rep.singular == 20);
  CHECK(rep.zero_weights == 20);
  CHECK(rep.flagged());
  CHECK_THROWS_AS(sl_is_log_marginal(pm, y, point_mass(1.0), 5, SlConfig{3}, SimConfig::exact(), rng), ContractViolation);
}

TEST_CASE("synthetic-likelihood Bayes factor is invariant to affine summary maps") {
  RngStream rng(13);
  std::vector<SummaryVector> s1, s2;
  for (int i = 0; i < 40; ++i) {
    s1.push_back(Eigen::Vector2d(rng.normal(), rng.normal() + 0.3 * i / 40.0));
    s2.push_back(Eigen::Vector2d(1.5 * rng.normal() + 0.2, rng.normal()));
  }
  const Eigen::Vector2d obs(0.1, 0.4);
  Eigen::Matrix2d A;
  A << 2.0, 0.5, -0.3, 1.2;
  const Eigen::Vector2d c(3.0, -1.0);
  auto map = [&](std::vector<SummaryVector> v) {
    for (auto& x : v) x = A * x + c;
    return v;
  };
  double a1, a2, b1, b2;
  REQUIRE(synthetic_log_likelihood(s1, obs, a1));
  REQUIRE(synthetic_log_likelihood(s2, obs, a2));
  REQUIRE(synthetic_log_likelihood(map(s1), A * obs + c, b1));
  REQUIRE(synthetic_log_likelihood(map(s2), A * obs + c, b2));
  CHECK((b1 - b2) == doctest::Approx(a1 - a2).epsilon(1e-10));
  CHECK(b1 != doctest::Approx(a1));
}

TEST_CASE("Bayes factors") {
  RunReport a;
  a.estimator = "mavis";
  a.log_evidence = -12.0;
  const auto zero = log_bayes_factor(a, a);
  CHECK(zero.defined);
  CHECK(zero.log_value == 0.0);
  RunReport b = a;
  b.estimator = "abc-is";
  b.summary_marginal = true;
  b.log_evidence = -13.5;
  const auto bf = log_bayes_factor(a, b);
  CHECK(bf.log_value == doctest::Approx(1.5));
  CHECK(bf.summary_marginal);
  CHECK(bf.estimators == "mavis/abc-is");
  b.log_evidence = kNegInf;
  CHECK_FALSE(log_bayes_factor(a, b).defined);
}

TEST_CASE("gaussian proposal validation") {
  CHECK_THROWS_AS(IsProposal::gaussian(Eigen::Vector2d(0, 0), Eigen::Matrix2d::Zero()), DomainError);
  Eigen::Matrix2d ns;
  ns << 1.0, 0.5, 0.2, 1.0;
  CHECK_THROWS_AS(IsProposal::gaussian(Eigen::Vector2d(0, 0), ns), DomainError);
  const auto q = IsProposal::gaussian(scalar(1.0), Eigen::MatrixXd::Constant(1, 1, 4.0));
  CHECK(q.log_density(scalar(3.0)) == doctest::Approx(-0.5 - std::log(2.0) - 0.5 * std::log(2.0 * std::numbers::pi)));
}

TEST_CASE("estimators are reproducible") {
  PoissonModel pm;
  const Counts y{3, 1, 4, 1, 5};
  RngStream a(14), b(14);
  const auto q = IsProposal::prior(pm);
  CHECK(sl_is_log_marginal(pm, y, q, 30, SlConfig{20}, SimConfig::exact(), a).log_evidence ==
        sl_is_log_marginal(pm, y, q, 30, SlConfig{20}, SimConfig::exact(), b).log_evidence);
}
