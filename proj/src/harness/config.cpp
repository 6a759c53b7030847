#include "evd/harness/config.hpp"

#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>

namespace evd {

namespace {

constexpr std::array<const char*, 7> kExperiments = {"toy-bf",        "ising-evidence",    "ising-smc",     "precision-smc",
                                                     "bias-accumulation", "prop1-sweep", "ergm-synthetic"};

}  // namespace

bool known_experiment(const std::string& id) {
  for (const char* e : kExperiments)
    if (id == e) return true;
  return false;
}

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::size_t ExperimentConfig::positive(const std::string& path, std::size_t fallback) const {
  const auto v = get<long long>(path, static_cast<long long>(fallback));
  if (v <= 0) throw ConfigError("config: " + path + " must be a positive integer");
  return static_cast<std::size_t>(v);
}

double ExperimentConfig::positive_real(const std::string& path, double fallback) const {
  const auto v = get<double>(path, fallback);
  if (!(v > 0.0)) throw ConfigError("config: " + path + " must be positive");
  return v;
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  try {
    boost::property_tree::ini_parser::read_ini(in, cfg.tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.message() + " at line " + std::to_string(e.line()));
  }
  cfg.id = cfg.tree.get<std::string>("experiment.id", "");
  if (cfg.id.empty()) throw ConfigError("config: missing experiment.id");
  if (!known_experiment(cfg.id)) throw ConfigError("config: unknown experiment '" + cfg.id + "'");
  const auto reps = cfg.get<long long>("experiment.replicates", 1);
  if (reps <= 0) throw ConfigError("config: experiment.replicates must be positive");
  cfg.replicates = static_cast<std::size_t>(reps);
  cfg.seed = cfg.get<std::uint64_t>("experiment.seed", 1);
  cfg.output = cfg.tree.get<std::string>("experiment.output", ".");
  cfg.hash = fnv1a_hex(text);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace evd
