#include "evd/models/dataset_io.hpp"

#include <fstream>
#include <sstream>

#include <boost/algorithm/string.hpp>

namespace evd {
namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out.precision(17);
  return out;
}

// Non-comment rows, split on commas.
std::vector<std::vector<std::string>> read_rows(const std::string& path, std::vector<std::string>* comments = nullptr) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    boost::algorithm::trim(line);
    if (line.empty()) continue;
    if (line.front() == '#') {
      if (comments) comments->push_back(line);
      continue;
    }
    std::vector<std::string> cells;
    boost::algorithm::split(cells, line, boost::is_any_of(","));
    for (auto& c : cells) boost::algorithm::trim(c);
    rows.push_back(std::move(cells));
  }
  return rows;
}

}  // namespace

void write_lattice(const std::string& path, const Lattice& l) {
  auto out = open_out(path);
  for (std::size_t i = 0; i < l.rows; ++i)
    for (std::size_t j = 0; j < l.cols; ++j) out << int{l.at(i, j)} << (j + 1 < l.cols ? ',' : '\n');
}

Lattice read_lattice(const std::string& path) {
  const auto rows = read_rows(path);
  if (rows.empty()) throw ContractViolation("empty lattice file " + path);
  Lattice l{rows.size(), rows.front().size(), {}};
  for (const auto& r : rows) {
    if (r.size() != l.cols) throw ContractViolation("ragged lattice file " + path);
    for (const auto& c : r) {
      const int s = std::stoi(c);
      if (s != 1 && s != -1) throw DomainError("lattice spins must be -1 or 1");
      l.spins.push_back(static_cast<std::int8_t>(s));
    }
  }
  return l;
}

void write_graph(const std::string& path, const Graph& g) {
  auto out = open_out(path);
  out << "# nodes=" << g.nodes << '\n';
  for (std::size_t i = 0; i < g.nodes; ++i)
    for (std::size_t j = i + 1; j < g.nodes; ++j)
      if (g.edge(i, j)) out << i << ',' << j << '\n';
}

Graph read_graph(const std::string& path) {
  std::vector<std::string> comments;
  const auto rows = read_rows(path, &comments);
  std::size_t nodes = 0;
  for (const auto& c : comments)
    if (auto pos = c.find("nodes="); pos != std::string::npos) nodes = std::stoul(c.substr(pos + 6));
  if (nodes == 0) throw ContractViolation("graph file needs a '# nodes=N' line: " + path);
  Graph g(nodes);
  for (const auto& r : rows) {
    if (r.size() != 2) throw ContractViolation("edge rows must be 'i,j'");
    const auto i = std::stoul(r[0]), j = std::stoul(r[1]);
    if (i >= nodes || j >= nodes || i == j) throw DomainError("edge outside node set or self loop");
    g.set(i, j, true);
  }
  return g;
}

void write_vectors(const std::string& path, const Vectors& y) {
  auto out = open_out(path);
  for (const auto& v : y)
    for (Eigen::Index i = 0; i < v.size(); ++i) out << v[i] << (i + 1 < v.size() ? ',' : '\n');
}

Vectors read_vectors(const std::string& path) {
  Vectors y;
  for (const auto& r : read_rows(path)) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(r.size()));
    for (std::size_t i = 0; i < r.size(); ++i) v[static_cast<Eigen::Index>(i)] = std::stod(r[i]);
    if (!y.empty() && v.size() != y.front().size()) throw ContractViolation("ragged vector file " + path);
    y.push_back(std::move(v));
  }
  return y;
}

void write_counts(const std::string& path, const Counts& y) {
  auto out = open_out(path);
  for (auto c : y) out << c << '\n';
}

Counts read_counts(const std::string& path) {
  Counts y;
  for (const auto& r : read_rows(path))
    for (const auto& c : r) y.push_back(std::stoll(c));
  return y;
}

}  // namespace evd
