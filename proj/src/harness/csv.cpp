#include "evd/harness/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <boost/algorithm/string.hpp>

#include "evd/core/types.hpp"

namespace evd {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

CsvTable::RowBuilder& CsvTable::RowBuilder::operator<<(const std::string& s) {
  if (s.find_first_of(",\n") != std::string::npos) throw ContractViolation("csv cell contains a separator: " + s);
  row_->push_back(s);
  return *this;
}

CsvTable::RowBuilder CsvTable::add_row() {
  rows_.emplace_back();
  return RowBuilder(rows_.back());
}

int CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header_.size(); ++i)
    if (header_[i] == name) return static_cast<int>(i);
  return -1;
}

double CsvTable::number(std::size_t row, int col) const {
  const std::string& s = rows_.at(row).at(static_cast<std::size_t>(col));
  if (s == "nan") return std::nan("");
  if (s == "inf") return INFINITY;
  if (s == "-inf") return -INFINITY;
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw DomainError("csv: not a number: '" + s + "'");
  return v;
}

std::string CsvTable::str() const {
  std::string out = boost::algorithm::join(header_, ",") + "\n";
  for (const auto& r : rows_) out += boost::algorithm::join(r, ",") + "\n";
  return out;
}

void CsvTable::write(const std::string& path) const {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << str();
}

CsvTable CsvTable::parse(const std::string& text) {
  CsvTable t;
  std::istringstream in(text);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    boost::algorithm::split(cells, line, boost::is_any_of(","));
    if (first) {
      t.header_ = std::move(cells);
      first = false;
    } else {
      if (cells.size() != t.header_.size()) throw DomainError("csv: ragged row: " + line);
      t.rows_.push_back(std::move(cells));
    }
  }
  return t;
}

CsvTable CsvTable::read(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse(ss.str());
}

}  // namespace evd
