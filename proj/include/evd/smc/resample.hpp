#pragma once

#include <span>
#include <string>
#include <vector>

#include "evd/core/rng.hpp"

namespace evd {

enum class ResampleScheme { multinomial, stratified, systematic };

ResampleScheme parse_resample_scheme(const std::string& name);
const char* to_string(ResampleScheme s);

/// Ancestor indices (sorted) for `count` offspring drawn from normalised
/// weights exp(log_w). Every scheme gives particle p an expected P w_p
/// offspring. Systematic counts are floor or ceil of P w_p; stratified counts
/// stay strictly within 2 of it.
std::vector<std::size_t> resample_indices(std::span<const double> log_w, std::size_t count, ResampleScheme scheme,
                                          RngStream& rng);

/// Offspring count per particle from an ancestor list.
std::vector<std::size_t> offspring_counts(std::span<const std::size_t> ancestors, std::size_t particles);

}  // namespace evd
