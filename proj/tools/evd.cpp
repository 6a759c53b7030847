#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "evd/core/parallel.hpp"
#include "evd/harness/experiments.hpp"
#include "evd/harness/summary.hpp"
#include "evd/models/dataset_io.hpp"

using namespace evd;

namespace {

constexpr int kConfigError = 2;
constexpr int kNumericalAbort = 3;

std::map<std::string, std::string> key_values(const std::vector<std::string>& args, std::vector<std::string>& files) {
  std::map<std::string, std::string> kv;
  for (const auto& a : args) {
    const auto eq = a.find('=');
    if (eq == std::string::npos)
      files.push_back(a);
    else
      kv[a.substr(0, eq)] = a.substr(eq + 1);
  }
  return kv;
}

double number(const std::map<std::string, std::string>& kv, const std::string& key, double fallback) {
  const auto it = kv.find(key);
  if (it == kv.end()) return fallback;
  try {
    return std::stod(it->second);
  } catch (const std::exception&) {
    throw ConfigError("oracle: bad number for " + key);
  }
}

const std::string& one_file(const std::vector<std::string>& files, const std::string& model) {
  if (files.size() != 1) throw ConfigError("oracle " + model + ": expected one data file");
  return files[0];
}

int oracle(const std::string& model, const std::vector<std::string>& args) {
  std::vector<std::string> files;
  const auto kv = key_values(args, files);
  std::cout.precision(17);
  if (model == "poisson" || model == "geometric" || model == "toy-bf") {
    const auto y = read_counts(one_file(files, model));
    const double lp = poisson_log_evidence(y), lg = geometric_log_evidence(y);
    if (model != "geometric") std::cout << "log_evidence_poisson " << lp << '\n';
    if (model != "poisson") std::cout << "log_evidence_geometric " << lg << '\n';
    if (model == "toy-bf") std::cout << "log_bf " << lp - lg << '\n';
  } else if (model == "precision") {
    const auto y = read_vectors(one_file(files, model));
    if (y.empty()) throw ConfigError("oracle precision: empty data");
    const auto d = static_cast<std::size_t>(y.front().size());
    const double nu = number(kv, "nu", 10.0 + static_cast<double>(d));
    std::cout << "log_evidence " << gaussian_precision_log_evidence(y, nu, Eigen::MatrixXd::Identity(d, d)) << '\n';
  } else if (model == "ising-logz") {
    const auto rows = static_cast<std::size_t>(number(kv, "rows", 10));
    const auto cols = static_cast<std::size_t>(number(kv, "cols", 10));
    const auto order = kv.count("theta2") ? IsingOrder::second : IsingOrder::first;
    ParameterVector th(order == IsingOrder::first ? 1 : 2);
    th[0] = number(kv, "theta", 0.0);
    if (order == IsingOrder::second) th[1] = number(kv, "theta2", 0.0);
    std::cout << "log_z " << ising_exact_log_z(th, rows, cols, order) << '\n';
  } else if (model == "ising-evidence") {
    const auto y = read_lattice(one_file(files, model));
    const IsingModel m(y.rows, y.cols, IsingOrder::first);
    const double S1 = m.stats(y, y.sites())[0];
    std::cout << "log_evidence "
              << ising_quadrature_log_evidence(y.rows, y.cols, S1, number(kv, "prior_lo", 0.0),
                                               number(kv, "prior_hi", 2.0))
              << '\n';
  } else {
    throw ConfigError("oracle: unknown model '" + model +
                      "' (poisson, geometric, toy-bf, precision, ising-logz, ising-evidence)");
  }
  return 0;
}

int run(const std::string& path, const std::string& output) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  std::ostringstream text;
  text << in.rdbuf();
  auto cfg = parse_config(text.str());
  if (!output.empty()) cfg.output = output;
  const auto t0 = std::chrono::steady_clock::now();
  const auto out = run_experiment(cfg);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_experiment(cfg, out, text.str());
  std::ofstream(std::filesystem::path(cfg.output) / "timing.txt")
      << "wall_seconds " << secs << "\nworkers " << worker_count() << '\n';
  for (const auto& n : out.notices) std::cerr << "notice: " << n << '\n';
  std::cerr << cfg.id << " (config " << cfg.hash << ", seed " << cfg.seed << "): wrote " << out.tables.size()
            << " tables to " << cfg.output << " in " << secs << " s\n";
  return 0;
}

int summarise_dir(const std::string& dir) {
  namespace fs = std::filesystem;
  const auto table = CsvTable::read((fs::path(dir) / "replicates.csv").string());
  std::string notice;
  const auto summary = summary_table(summarise(estimate_rows(table, &notice)));
  summary.write((fs::path(dir) / "summary.csv").string());
  if (!notice.empty()) std::cerr << "notice: " << notice << '\n';
  std::cout << summary.str();
  return 0;
}

int prop1(std::size_t instances, std::uint64_t seed, const std::string& output) {
  if (instances == 0) throw ConfigError("prop1: --instances must be positive");
  Prop1SweepParams p;
  p.instances = instances;
  p.seed = seed;
  const auto res = run_prop1_sweep(p);
  const auto table = prop1_table(res, p.generator);
  if (output.empty())
    std::cout << table.str();
  else
    table.write(output);
  std::cerr << "prop1: " << res.holding << "/" << instances << " instances hold; min margin "
            << format_double(res.min_margin) << ", min lemma margin " << format_double(res.min_lemma_margin) << '\n';
  return res.holding == instances ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Evidence estimation for models with intractable normalising constants"};
  app.require_subcommand(1);

  std::string config_path, output;
  auto* run_cmd = app.add_subcommand("run", "Run the experiment described by an INI config");
  run_cmd->add_option("config", config_path, "Config file")->required();
  run_cmd->add_option("-o,--output", output, "Override experiment.output");

  std::string dir;
  auto* sum_cmd = app.add_subcommand("summarise", "Rebuild summary.csv from a run directory's replicates.csv");
  sum_cmd->add_option("dir", dir, "Run directory")->required();

  std::size_t instances = 1000;
  std::uint64_t seed = 1;
  std::string prop1_out;
  auto* p1_cmd = app.add_subcommand("prop1", "Check the uniform TV bound on random finite flows");
  p1_cmd->add_option("--instances", instances, "Number of random instances");
  p1_cmd->add_option("--seed", seed, "Master seed");
  p1_cmd->add_option("-o,--output", prop1_out, "CSV path (default: stdout)");

  std::string model;
  std::vector<std::string> params;
  auto* or_cmd = app.add_subcommand("oracle", "Print analytic reference values");
  or_cmd->add_option("model", model, "poisson | geometric | toy-bf | precision | ising-logz | ising-evidence")
      ->required();
  or_cmd->add_option("params", params, "Data file and/or key=value parameters");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  try {
    if (*run_cmd) return run(config_path, output);
    if (*sum_cmd) return summarise_dir(dir);
    if (*p1_cmd) return prop1(instances, seed, prop1_out);
    if (*or_cmd) return oracle(model, params);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const NumericalAbort& e) {
    std::cerr << "numerical abort: " << e.what() << '\n';
    return kNumericalAbort;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
