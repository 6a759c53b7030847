#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>

#include <boost/property_tree/ptree.hpp>

namespace evd {

/// Bad or inconsistent experiment configuration (CLI exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One experiment = one INI file:
///
///   [experiment]
///   id = toy-bf
///   replicates = 100
///   seed = 1
///   output = out/toy
///
/// plus free-form sections per model / estimator ([data], [mavis], ...).
struct ExperimentConfig {
  std::string id;
  std::size_t replicates = 1;
  std::uint64_t seed = 1;
  std::string output = ".";
  boost::property_tree::ptree tree;
  /// 16 hex digits of FNV-1a over the file text.
  std::string hash;

  template <class T>
  T get(const std::string& path, T fallback) const {
    // The defaulted overload of ptree::get swallows conversion failures.
    if (!tree.get_child_optional(path)) return fallback;
    try {
      return tree.get<T>(path);
    } catch (const boost::property_tree::ptree_bad_data&) {
      throw ConfigError("config: bad value for " + path);
    }
  }
  /// Positive integer; throws ConfigError on 0 or garbage.
  std::size_t positive(const std::string& path, std::size_t fallback) const;
  /// Positive real.
  double positive_real(const std::string& path, double fallback) const;
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

std::string fnv1a_hex(const std::string& text);

bool known_experiment(const std::string& id);

}  // namespace evd
