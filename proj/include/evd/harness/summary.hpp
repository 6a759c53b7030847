#pragma once

#include <optional>
#include <string>
#include <vector>

#include "evd/harness/csv.hpp"

namespace evd {

struct EstimateRow {
  std::string group;
  double estimate = 0.0;
  /// Reference value for this row, if one exists.
  std::optional<double> oracle;
};

struct SummaryRow {
  std::string group;
  std::size_t n = 0;
  /// Rows with a non-finite estimate; excluded from every statistic.
  std::size_t flagged = 0;
  double min = 0, q1 = 0, median = 0, q3 = 0, max = 0, mean = 0, sd = 0;
  /// mean(estimate - oracle) and mean((estimate - oracle)^2); present only
  /// when every finite row of the group carries an oracle.
  std::optional<double> bias, mse;
};

/// Per-group summaries, groups in order of first appearance.
std::vector<SummaryRow> summarise(const std::vector<EstimateRow>& rows);

/// Reads "estimator", "estimate" and (optionally) "oracle" columns.
/// `notice` receives a message when bias columns had to be omitted.
std::vector<EstimateRow> estimate_rows(const CsvTable& table, std::string* notice = nullptr);

CsvTable summary_table(const std::vector<SummaryRow>& rows);

}  // namespace evd
