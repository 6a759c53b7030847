// One PASS/FAIL line per acceptance criterion. Usage: evd_acceptance [1-7 ...]
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include "evd/core/log_math.hpp"
#include "evd/core/moments.hpp"
#include "evd/harness/experiments.hpp"
#include "evd/models/ising.hpp"
#include "evd/smc/resample.hpp"
#include "evd/smc/smc.hpp"
#include "evd/zratio/auxiliary.hpp"
#include "evd/zratio/zratio.hpp"

#ifndef EVD_SOURCE_DIR
#define EVD_SOURCE_DIR "."
#endif

using namespace evd;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

ExperimentOutput run_config(const std::string& name) {
  return run_experiment(load_config(std::string(EVD_SOURCE_DIR) + "/configs/" + name));
}

const CsvTable& table(const ExperimentOutput& out, const std::string& name) {
  for (const auto& [n, t] : out.tables)
    if (n == name) return t;
  throw std::runtime_error("missing table " + name);
}

std::vector<double> column(const CsvTable& t, const std::string& name) {
  const int c = t.column(name);
  if (c < 0) throw std::runtime_error("missing column " + name);
  std::vector<double> v;
  for (std::size_t i = 0; i < t.rows().size(); ++i) v.push_back(t.number(i, c));
  return v;
}

double ols_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double mx = mean(x), my = mean(y);
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

double median_abs_error(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> e;
  for (std::size_t i = 0; i < x.size(); ++i) e.push_back(std::abs(y[i] - x[i]));
  return quantile(e, 0.5);
}

// Finite (truth, estimate) pairs, optionally restricted by a truth predicate.
std::pair<std::vector<double>, std::vector<double>> finite_pairs(const std::vector<double>& truth,
                                                                 const std::vector<double>& est,
                                                                 const std::function<bool(double)>& keep = nullptr) {
  std::vector<double> x, y;
  for (std::size_t i = 0; i < truth.size(); ++i)
    if (std::isfinite(est[i]) && (!keep || keep(truth[i]))) {
      x.push_back(truth[i]);
      y.push_back(est[i]);
    }
  return {x, y};
}

Verdict toy_oracle() {
  const auto out = run_config("toy-bf.ini");
  const auto& d = table(out, "datasets.csv");
  const auto truth = column(d, "true_log_bf");
  const auto [xm, ym] = finite_pairs(truth, column(d, "mavis"));
  const auto [xs, ys] = finite_pairs(truth, column(d, "sl"), [](double t) { return std::abs(t) <= std::log(10.0); });
  const auto [xa, ya] = finite_pairs(truth, column(d, "abc"));
  const double slope_m = ols_slope(xm, ym), mae_m = median_abs_error(xm, ym);
  const double mae_s = median_abs_error(xs, ys), slope_a = ols_slope(xa, ya);
  Verdict v;
  v.pass = truth.size() == 100 && xm.size() == truth.size() && slope_m >= 0.8 && slope_m <= 1.2 && mae_m <= 0.75 &&
           !xs.empty() && mae_s <= 0.5 && slope_a < 0.9;
  v.detail = "datasets " + std::to_string(truth.size()) + "; mavis slope " + fmt(slope_m) + " mae " + fmt(mae_m) +
             " (finite " + std::to_string(xm.size()) + "); sl mae " + fmt(mae_s) + " on " + std::to_string(xs.size()) +
             " |log10 BF|<=1; abc slope " + fmt(slope_a) + " (finite " + std::to_string(xa.size()) + ")";
  return v;
}

Verdict ising_evidence() {
  const auto out = run_config("ising-evidence.ini");
  const auto& reps = table(out, "replicates.csv");
  const auto est = column(reps, "estimate");
  const double truth = column(reps, "oracle").front();
  const double err = mean(est) - truth;
  const auto& cmp = table(out, "comparison.csv");
  const auto vs = column(cmp, "var_savis"), vm = column(cmp, "var_mavis");
  const auto ss = column(cmp, "sweeps_savis"), sm = column(cmp, "sweeps_mavis");
  std::size_t wins = 0;
  bool matched = true;
  for (std::size_t i = 0; i < vs.size(); ++i) {
    wins += vm[i] <= vs[i] ? 1 : 0;
    matched = matched && ss[i] == sm[i];
  }
  Verdict v;
  v.pass = est.size() == 20 && std::abs(err) <= 0.3 && vs.size() == 20 && wins >= 15 && matched;
  v.detail = "savis mean " + fmt(mean(est), 8) + " vs truth " + fmt(truth, 8) + " (error " + fmt(err) +
             "); mavis variance <= savis in " + std::to_string(wins) + "/" + std::to_string(vs.size()) +
             (matched ? " at matched sweeps" : " (sweep budgets differ)");
  return v;
}

Verdict precision_smc() {
  const auto out = run_config("precision-smc.ini");
  const auto& reps = table(out, "replicates.csv");
  const auto est = column(reps, "estimate");
  const double truth = column(reps, "oracle").front();
  std::size_t within = 0;
  std::ostringstream errs;
  for (double e : est) {
    within += std::abs(e - truth) <= 1.0 ? 1 : 0;
    errs << ' ' << fmt(e - truth, 3);
  }
  Verdict v;
  v.pass = est.size() == 10 && within >= 8;
  v.detail = std::to_string(within) + "/" + std::to_string(est.size()) + " runs within 1 nat of " + fmt(truth, 8) +
             "; errors" + errs.str();
  return v;
}

Verdict bias_accumulation() {
  const auto out = run_config("bias-accumulation.ini");
  const auto& c = table(out, "curves.csv");
  const int sc = c.column("sampler"), tc = c.column("t"), bc = c.column("bias"), ec = c.column("se");
  double last_t = 0;
  for (std::size_t i = 0; i < c.rows().size(); ++i) last_t = std::max(last_t, c.number(i, tc));
  std::map<std::string, std::pair<double, double>> fin;
  for (std::size_t i = 0; i < c.rows().size(); ++i)
    if (c.number(i, tc) == last_t) fin[c.rows()[i][static_cast<std::size_t>(sc)]] = {c.number(i, bc), c.number(i, ec)};
  const auto [be, se_e] = fin.at("exact");
  const auto [bu, se_u] = fin.at("unbiased-is");
  const double bm = fin.at("bridge-mcmc").first, bp = fin.at("bridge-perfect").first;
  Verdict v;
  v.pass = std::abs(be) <= 2 * se_e && std::abs(bu) <= 3 * se_u && std::abs(bp) <= std::abs(bm);
  v.detail = "t=" + fmt(last_t) + ": exact bias " + fmt(be) + " (2 se " + fmt(2 * se_e) + "); unbiased-is " + fmt(bu) +
             " (3 se " + fmt(3 * se_u) + "); bridge perfect |" + fmt(bp) + "| vs mcmc |" + fmt(bm) + "|";
  return v;
}

Verdict prop1() {
  const auto out = run_config("prop1-sweep.ini");
  const auto& t = table(out, "prop1.csv");
  const auto holds = column(t, "holds"), margin = column(t, "margin"), lemma = column(t, "lemma_margin");
  std::size_t ok = 0;
  for (std::size_t i = 0; i < holds.size(); ++i) ok += holds[i] == 1 && margin[i] >= 1e-10 && lemma[i] >= 1e-10;
  Verdict v;
  v.pass = holds.size() == 1000 && ok == holds.size();
  v.detail = std::to_string(ok) + "/" + std::to_string(holds.size()) + " with slack >= 1e-10; min bound slack " +
             fmt(*std::min_element(margin.begin(), margin.end())) + ", min lemma slack " +
             fmt(*std::min_element(lemma.begin(), lemma.end()));
  return v;
}

Verdict micro_oracles() {
  const auto theta = [](double v) { return ParameterVector::Constant(1, v); };
  std::ostringstream why;

  // Exhaustive E[q_u(u) / gamma(u|theta)] under u ~ f(.|theta) on a 2x2 lattice.
  IsingModel m(2, 2, IsingOrder::first, 0.0, 2.0);
  UniformSpinAux qu;
  double sav_err = 0;
  for (double t : {0.0, 0.25, 0.7, 1.3, 2.0}) {
    const double lz = m.exact_log_z(theta(t), 4);
    std::vector<double> terms;
    for (const auto& u : m.enumerate(4))
      terms.push_back(m.log_gamma(u, theta(t), 4) - lz + sav_log_term(m, theta(t), u, 4, qu));
    sav_err = std::max(sav_err, std::abs(std::exp(log_sum_exp(terms)) - std::exp(-lz)));
  }
  const bool sav_ok = sav_err <= 1e-12;
  why << "sav_inv_z max error " << fmt(sav_err) << "; ";

  // Weight identity: extended-target ratio against the closed form.
  RngStream rng(2024);
  const auto y = m.simulate(theta(0.6), 4, rng, SimConfig::exact());
  auto log_q = [](const Lattice& u, const ParameterVector&) {
    std::size_t k = 0;
    for (auto s : u.spins) k += s != 0;
    return -static_cast<double>(k) * std::log(2.0);
  };
  const Eigen::VectorXd scales = Eigen::VectorXd::Constant(1, 0.4);
  int wi = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t k = 1 + rng.uniform_index(4);
    const auto a = theta(2.0 * rng.uniform()), b = theta(2.0 * rng.uniform());
    const auto ua = m.simulate(a, k, rng, SimConfig::exact()), ub = m.simulate(b, k, rng, SimConfig::exact());
    wi += weight_identity_check(m, y, k - 1, k, a, ua, b, ub, scales, log_q, 1e-12).holds ? 1 : 0;
  }
  why << "weight identity " << wi << "/1000; ";

  // Resampling: offspring-count bounds and unbiased offspring means.
  bool counts_ok = true;
  for (int trial = 0; trial < 2000; ++trial) {
    std::vector<double> lw(7);
    for (auto& v : lw) v = 2.0 * rng.normal();
    const double tot = log_sum_exp(lw);
    const std::size_t P = 13;
    const auto cs = offspring_counts(resample_indices(lw, P, ResampleScheme::systematic, rng), 7);
    const auto ct = offspring_counts(resample_indices(lw, P, ResampleScheme::stratified, rng), 7);
    const auto cm = offspring_counts(resample_indices(lw, P, ResampleScheme::multinomial, rng), 7);
    std::size_t sum_m = 0;
    for (std::size_t i = 0; i < 7; ++i) {
      const double e = static_cast<double>(P) * std::exp(lw[i] - tot);
      counts_ok = counts_ok && cs[i] >= std::floor(e) - 1e-9 && cs[i] <= std::ceil(e) + 1e-9;
      counts_ok = counts_ok && std::abs(static_cast<double>(ct[i]) - e) < 2.0;
      sum_m += cm[i];
    }
    counts_ok = counts_ok && sum_m == P;
  }
  const std::vector<double> lw{std::log(0.1), std::log(0.45), std::log(0.05), std::log(0.4)};
  bool unbiased_ok = true;
  for (auto scheme : {ResampleScheme::multinomial, ResampleScheme::stratified, ResampleScheme::systematic}) {
    const int trials = 50000;
    std::vector<std::vector<double>> c(4);
    for (int t = 0; t < trials; ++t) {
      const auto oc = offspring_counts(resample_indices(lw, 5, scheme, rng), 4);
      for (int i = 0; i < 4; ++i) c[i].push_back(static_cast<double>(oc[i]));
    }
    for (int i = 0; i < 4; ++i) {
      const double se = std::sqrt(variance(c[i]) / trials);
      unbiased_ok = unbiased_ok && std::abs(mean(c[i]) - 5 * std::exp(lw[i])) <= 4 * se + 1e-12;
    }
  }
  why << "resampling counts " << (counts_ok ? "ok" : "BAD") << ", means " << (unbiased_ok ? "ok" : "BAD") << "; ";

  // log-sum-exp shift invariance.
  int lse = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    std::vector<double> x(1 + rng.uniform_index(50));
    for (auto& v : x) v = 50.0 * rng.normal();
    const double c = 600.0 * (2.0 * rng.uniform() - 1.0);
    std::vector<double> z = x;
    for (auto& v : z) v += c;
    lse += std::abs(log_sum_exp(z) - (log_sum_exp(x) + c)) <= 1e-12 * (1.0 + std::abs(c)) ? 1 : 0;
  }
  why << "log-sum-exp shift " << lse << "/10000";
  return {sav_ok && wi == 1000 && counts_ok && unbiased_ok && lse == 10000, why.str()};
}

Verdict large_ising_ess() {
  const auto cfg = load_config(std::string(EVD_SOURCE_DIR) + "/configs/ising-20x20.ini");
  const auto out = run_experiment(cfg);
  const auto ess = column(table(out, "replicates.csv"), "ess");
  const double P = static_cast<double>(cfg.positive("savis.P", 1000));
  const double avg = mean(ess);
  Verdict v;
  v.pass = !ess.empty() && avg > 0.5 * P;
  v.detail = "20x20 SAVIS average ESS " + fmt(avg) + " of P=" + fmt(P) + " over " + std::to_string(ess.size()) +
             " runs (min " + fmt(*std::min_element(ess.begin(), ess.end())) + ")";
  return v;
}

struct Criterion {
  int id;
  const char* name;
  double limit_s;
  Verdict (*run)();
};

}  // namespace

int main(int argc, char** argv) {
  const Criterion all[] = {{1, "toy Bayes-factor oracle agreement", 600, toy_oracle},
                           {2, "10x10 Ising evidence", 1200, ising_evidence},
                           {3, "precision SMC", 900, precision_smc},
                           {4, "bias accumulation", 600, bias_accumulation},
                           {5, "uniform TV bound and lemma", 60, prop1},
                           {6, "exactness micro-oracles", 60, micro_oracles},
                           {7, "20x20 SAVIS ESS smoke run", 1800, large_ising_ess}};
  std::set<int> pick;
  for (int i = 1; i < argc; ++i) pick.insert(std::atoi(argv[i]));
  int failed = 0;
  for (const auto& c : all) {
    if (!pick.empty() && !pick.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs <= c.limit_s;
    const bool pass = v.pass && in_time;
    failed += pass ? 0 : 1;
    std::printf("criterion %d %s: %s | %s | %.1f s (limit %.0f s%s)\n", c.id, c.name, pass ? "PASS" : "FAIL",
                v.detail.c_str(), secs, c.limit_s, in_time ? "" : ", EXCEEDED");
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
