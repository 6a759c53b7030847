#include <cmath>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "evd/evidence/estimators.hpp"
#include "evd/harness/experiments.hpp"
#include "evd/harness/summary.hpp"
#include "evd/models/ising.hpp"

using namespace evd;

namespace {

const char* kBiasConfig = R"([experiment]
id = bias-accumulation
replicates = 3
seed = 5
output = unused

[model]
n = 20

[smc]
P = 8
M = 4
)";

std::vector<EstimateRow> group_rows(const std::string& g, std::initializer_list<double> xs) {
  std::vector<EstimateRow> rows;
  for (double x : xs) rows.push_back({g, x, std::nullopt});
  return rows;
}

}  // namespace

TEST_CASE("config parsing reads the experiment section and hashes the text") {
  const auto cfg = parse_config(kBiasConfig);
  CHECK(cfg.id == "bias-accumulation");
  CHECK(cfg.replicates == 3);
  CHECK(cfg.seed == 5);
  CHECK(cfg.positive("smc.P", 1) == 8);
  CHECK(cfg.positive("smc.missing", 7) == 7);
  CHECK(cfg.hash == fnv1a_hex(kBiasConfig));
  CHECK(cfg.hash.size() == 16);
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS(parse_config("[experiment]\nreplicates = 3\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[experiment]\nid = nope\nreplicates = 3\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[experiment]\nid = toy-bf\nreplicates = 0\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[experiment]\nid = toy-bf\nreplicates = -2\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[experiment\nid = toy-bf\n"), ConfigError);
  const auto cfg = parse_config("[experiment]\nid = toy-bf\nreplicates = 2\n[mavis]\nK = 0\nP = abc\n");
  CHECK_THROWS_AS(cfg.positive("mavis.K", 1), ConfigError);
  CHECK_THROWS_AS(cfg.positive("mavis.P", 1), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/dir/x.ini"), ConfigError);
}

TEST_CASE("csv doubles round-trip exactly") {
  CsvTable t({"a", "b", "c"});
  const double vals[] = {0.1, -1.0 / 3.0, 1e-300, 6.02214076e23, std::nextafter(1.0, 2.0)};
  for (double v : vals) t.add_row() << v << "x" << std::uint64_t{42};
  t.add_row() << NAN << "y" << INFINITY;
  const auto back = CsvTable::parse(t.str());
  REQUIRE(back.rows().size() == 6);
  CHECK(back.header() == t.header());
  for (std::size_t i = 0; i < 5; ++i) CHECK(back.number(i, 0) == vals[i]);
  CHECK(std::isnan(back.number(5, 0)));
  CHECK(back.number(5, 2) == INFINITY);
  CHECK(format_double(-INFINITY) == "-inf");
  CHECK(back.column("c") == 2);
  CHECK(back.column("zzz") == -1);
}

TEST_CASE("summary of a single row") {
  const auto s = summarise(group_rows("g", {2.5}));
  REQUIRE(s.size() == 1);
  CHECK(s[0].n == 1);
  CHECK(s[0].min == 2.5);
  CHECK(s[0].median == 2.5);
  CHECK(s[0].max == 2.5);
  CHECK(s[0].sd == 0.0);
  CHECK_FALSE(s[0].bias.has_value());
}

TEST_CASE("summary quantiles of 1..5") {
  auto rows = group_rows("b", {5, 3, 1, 4, 2});
  rows.push_back({"a", 7.0, std::nullopt});
  rows.push_back({"b", NAN, std::nullopt});
  const auto s = summarise(rows);
  REQUIRE(s.size() == 2);
  CHECK(s[0].group == "b");
  CHECK(s[1].group == "a");
  CHECK(s[0].n == 5);
  CHECK(s[0].flagged == 1);
  CHECK(s[0].min == 1.0);
  CHECK(s[0].q1 == 2.0);
  CHECK(s[0].median == 3.0);
  CHECK(s[0].q3 == 4.0);
  CHECK(s[0].max == 5.0);
  CHECK(s[0].mean == 3.0);
  CHECK(s[0].sd == doctest::Approx(std::sqrt(2.5)).epsilon(1e-14));
}

TEST_CASE("summary bias and mse against oracles") {
  std::vector<EstimateRow> rows{{"e", 1.0, 0.5}, {"e", 2.0, 0.5}, {"e", 0.0, 0.5}, {"f", 1.0, std::nullopt}};
  const auto s = summarise(rows);
  REQUIRE(s[0].bias.has_value());
  CHECK(*s[0].bias == doctest::Approx(0.5));
  CHECK(*s[0].mse == doctest::Approx((0.25 + 2.25 + 0.25) / 3.0));
  CHECK_FALSE(s[1].bias.has_value());
  const auto t = summary_table(s);
  CHECK(t.column("bias") >= 0);
  CHECK(t.rows()[1][static_cast<std::size_t>(t.column("bias"))].empty());

  CsvTable reps({"estimator", "estimate"});
  reps.add_row() << "x" << 1.0;
  std::string notice;
  const auto er = estimate_rows(reps, &notice);
  CHECK_FALSE(notice.empty());
  CHECK(summary_table(summarise(er)).column("bias") == -1);
}

TEST_CASE("simulation budget is exact, outside-support proposals cost nothing") {
  const IsingModel m(3, 3, IsingOrder::first);
  RngStream rng(11);
  const auto y = m.simulate(ParameterVector::Constant(1, 0.3), 9, rng, SimConfig::gibbs(50));
  // Centred at the prior boundary so roughly half the proposals fall outside.
  const auto q = IsProposal::gaussian(Eigen::VectorXd::Constant(1, 0.0), Eigen::MatrixXd::Constant(1, 1, 0.04));
  const SimConfig sim = SimConfig::gibbs(3);
  const std::size_t P = 200, M = 10;
  const auto rep = sl_is_log_marginal(m, y, q, P, SlConfig{M}, sim, rng);
  CHECK(rep.outside_support > 50);
  CHECK(rep.outside_support < 150);
  CHECK(rep.sweeps == (P - rep.outside_support) * M * sim.draw_cost());
}

TEST_CASE("reruns of an experiment are byte-identical") {
  const auto cfg = parse_config(kBiasConfig);
  const auto a = run_experiment(cfg), b = run_experiment(cfg);
  REQUIRE(a.tables.size() == b.tables.size());
  for (std::size_t i = 0; i < a.tables.size(); ++i) {
    CHECK(a.tables[i].first == b.tables[i].first);
    CHECK(a.tables[i].second.str() == b.tables[i].second.str());
  }

  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / ("evd_harness_" + cfg.hash);
  auto c2 = cfg;
  c2.output = dir.string();
  write_experiment(c2, a, kBiasConfig);
  CHECK(fs::exists(dir / "summary.csv"));
  CHECK(fs::exists(dir / "curves.csv"));
  std::ifstream in(dir / "config.ini");
  std::string first;
  std::getline(in, first);
  CHECK(first.find(cfg.hash) != std::string::npos);
  const auto reread = CsvTable::read((dir / "replicates.csv").string());
  CHECK(reread.str() == a.tables[1].second.str());
  fs::remove_all(dir);
}
