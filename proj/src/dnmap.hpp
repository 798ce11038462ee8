#pragma once

#include <optional>
#include <string>
#include <vector>

#include "forward.hpp"

namespace plap::dn {

using field::MatrixField;
using field::ScalarField;
using fwd::SolverOptions;
using geo::Mesh;

struct Pairing {
  double value = 0.0;
  std::string f_id;
  std::string g_id;
  fwd::Solution solution;  // the solve that produced the pairing
};

// Family of boundary data over which the DN map is probed. Only boundary
// values bind; interior values seed the solver.
struct BoundaryDictionary {
  struct Entry {
    std::string label;
    std::vector<double> values;
  };
  std::vector<Entry> entries;

  void validate(const Mesh& mesh) const;  // unique labels, one non-constant entry
  int size() const { return static_cast<int>(entries.size()); }
};

// Volume form of the DN pairing evaluated at an already-computed solution:
// sum_T sigma_T (A g_u . g_u)^((p-2)/2) (A g_u . g_v) |T|.
double pairing_value(const Mesh& mesh, const ScalarField& sigma, const MatrixField& A, double p,
                     const std::vector<double>& u, const std::vector<double>& g);

// <Lambda_sigma(f), g>: solves for f, then integrates against the linear
// interpolant of g. Extension independent up to solver tolerance.
Pairing dn_pairing(const Mesh& mesh, const ScalarField& sigma, const MatrixField& A, double p,
                   const std::vector<double>& f, const std::vector<double>& g,
                   const SolverOptions& opts = {});

struct Table {
  std::vector<std::string> labels;
  std::vector<std::vector<double>> values;   // values[i][j] = <Lambda(f_i), f_j>
  std::vector<double> energies;              // solution energy per row
  std::vector<std::string> row_errors;       // empty when the row solved

  double value(int i, int j) const { return values[i][j]; }
  bool ok() const;
};

// m x m pairing table over a dictionary; one solve per row, rows may run in
// parallel. Solver failures are recorded per row, not fatal.
Table dn_table(const Mesh& mesh, const ScalarField& sigma, const MatrixField& A, double p,
               const BoundaryDictionary& dict, const SolverOptions& opts = {}, int threads = 1);

// Default probe family: traces of x1, x2, x1+x2, x1-x2 plus `bumps` boundary
// bump functions centered at equispaced boundary arclength positions. The
// bump half-width is width_factor * perimeter / bumps.
BoundaryDictionary default_dictionary(const Mesh& mesh, int bumps, double width_factor = 1.0,
                                      bool include_linears = true);

// Cosine-squared bump of the given half-width centered at arclength s0,
// sampled on the boundary cycle; zero at interior vertices.
std::vector<double> boundary_bump(const Mesh& mesh, double s0, double half_width);

}  // namespace plap::dn
