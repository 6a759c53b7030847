#include "evd/harness/summary.hpp"

#include <cmath>
#include <map>

#include "evd/core/moments.hpp"
#include "evd/core/types.hpp"

namespace evd {

std::vector<SummaryRow> summarise(const std::vector<EstimateRow>& rows) {
  std::vector<std::string> order;
  std::map<std::string, std::vector<const EstimateRow*>> groups;
  for (const auto& r : rows) {
    auto [it, fresh] = groups.try_emplace(r.group);
    if (fresh) order.push_back(r.group);
    it->second.push_back(&r);
  }
  std::vector<SummaryRow> out;
  for (const auto& g : order) {
    SummaryRow s;
    s.group = g;
    std::vector<double> x, err;
    bool all_oracle = true;
    for (const auto* r : groups[g]) {
      if (!std::isfinite(r->estimate)) {
        ++s.flagged;
        continue;
      }
      x.push_back(r->estimate);
      if (r->oracle && std::isfinite(*r->oracle))
        err.push_back(r->estimate - *r->oracle);
      else
        all_oracle = false;
    }
    s.n = x.size();
    if (!x.empty()) {
      s.min = quantile(x, 0.0);
      s.q1 = quantile(x, 0.25);
      s.median = quantile(x, 0.5);
      s.q3 = quantile(x, 0.75);
      s.max = quantile(x, 1.0);
      s.mean = mean(x);
      s.sd = x.size() > 1 ? std::sqrt(variance(x)) : 0.0;
      if (all_oracle) {
        s.bias = mean(err);
        double m = 0.0;
        for (double e : err) m += e * e;
        s.mse = m / static_cast<double>(err.size());
      }
    }
    out.push_back(s);
  }
  return out;
}

std::vector<EstimateRow> estimate_rows(const CsvTable& table, std::string* notice) {
  const int g = table.column("estimator"), e = table.column("estimate"), o = table.column("oracle");
  if (g < 0 || e < 0) throw ContractViolation("summary input needs 'estimator' and 'estimate' columns");
  if (o < 0 && notice) *notice = "no oracle column: bias and MSE omitted";
  std::vector<EstimateRow> rows;
  for (std::size_t i = 0; i < table.rows().size(); ++i) {
    EstimateRow r;
    r.group = table.rows()[i][static_cast<std::size_t>(g)];
    r.estimate = table.number(i, e);
    if (o >= 0) {
      const double v = table.number(i, o);
      if (std::isfinite(v)) r.oracle = v;
    }
    rows.push_back(r);
  }
  return rows;
}

CsvTable summary_table(const std::vector<SummaryRow>& rows) {
  bool any_bias = false;
  for (const auto& r : rows) any_bias = any_bias || r.bias.has_value();
  std::vector<std::string> header{"estimator", "n", "flagged", "min", "q1", "median", "q3", "max", "mean", "sd"};
  if (any_bias) {
    header.push_back("bias");
    header.push_back("mse");
  }
  CsvTable t(header);
  for (const auto& r : rows) {
    auto row = t.add_row();
    row << r.group << static_cast<std::uint64_t>(r.n) << static_cast<std::uint64_t>(r.flagged) << r.min << r.q1
        << r.median << r.q3 << r.max << r.mean << r.sd;
    if (any_bias) {
      if (r.bias)
        row << *r.bias << *r.mse;
      else
        row << "" << "";
    }
  }
  return t;
}

}  // namespace evd
