#include "evd/smc/smc.hpp"

namespace evd {

WeightMode parse_weight_mode(const std::string& name) {
  if (name == "exact") return WeightMode::exact;
  if (name == "unbiased-is") return WeightMode::unbiased_is;
  if (name == "biased-bridge") return WeightMode::biased_bridge;
  throw ContractViolation("unknown weight mode '" + name + "'");
}

const char* to_string(WeightMode m) {
  switch (m) {
    case WeightMode::exact: return "exact";
    case WeightMode::unbiased_is: return "unbiased-is";
    case WeightMode::biased_bridge: return "biased-bridge";
  }
  return "?";
}

MoveKind parse_move_kind(const std::string& name) {
  if (name == "exchange") return MoveKind::exchange;
  if (name == "mh" || name == "single-site-mh") return MoveKind::single_site_mh;
  if (name == "perfect") return MoveKind::perfect_posterior;
  if (name == "none") return MoveKind::none;
  throw ContractViolation("unknown move kind '" + name + "'");
}

const char* to_string(MoveKind m) {
  switch (m) {
    case MoveKind::exchange: return "exchange";
    case MoveKind::single_site_mh: return "mh";
    case MoveKind::perfect_posterior: return "perfect";
    case MoveKind::none: return "none";
  }
  return "?";
}

}  // namespace evd
