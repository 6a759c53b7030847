#pragma once

#include <string>

#include "evd/models/count_models.hpp"
#include "evd/models/ergm.hpp"
#include "evd/models/ising.hpp"
#include "evd/models/precision.hpp"

namespace evd {

// Plain CSV dataset files. Lattices are rows of +-1, graphs are "i,j" edge
// lists preceded by a "# nodes=N" line, vectors and counts are one
// observation per row. Lines starting with '#' are otherwise ignored.

void write_lattice(const std::string& path, const Lattice& l);
Lattice read_lattice(const std::string& path);

void write_graph(const std::string& path, const Graph& g);
Graph read_graph(const std::string& path);

void write_vectors(const std::string& path, const Vectors& y);
Vectors read_vectors(const std::string& path);

void write_counts(const std::string& path, const Counts& y);
Counts read_counts(const std::string& path);

}  // namespace evd
