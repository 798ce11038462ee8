#include "dnmap.hpp"

#include <cmath>
#include <limits>
#include <set>

#include "parallel.hpp"

namespace {
constexpr double kPi = 3.14159265358979323846;
}

namespace plap::dn {

void BoundaryDictionary::validate(const Mesh& mesh) const {
  if (entries.empty()) throw std::invalid_argument("dictionary: empty");
  std::set<std::string> labels;
  bool has_nonconstant = false;
  for (const auto& e : entries) {
    if (!labels.insert(e.label).second)
      throw std::invalid_argument("dictionary: duplicate label '" + e.label + "'");
    if (e.values.size() != static_cast<size_t>(mesh.vertex_count()))
      throw std::invalid_argument("dictionary: entry '" + e.label + "' size mismatch");
    double lo = e.values[0], hi = e.values[0];
    for (int v = 0; v < mesh.vertex_count(); ++v) {
      if (!mesh.is_boundary_vertex(v)) continue;
      lo = std::min(lo, e.values[v]);
      hi = std::max(hi, e.values[v]);
    }
    if (hi - lo > 0.0) has_nonconstant = true;
  }
  if (!has_nonconstant)
    throw std::invalid_argument("dictionary: needs at least one non-constant entry");
}

double pairing_value(const Mesh& mesh, const ScalarField& sigma, const MatrixField& A, double p,
                     const std::vector<double>& u, const std::vector<double>& g) {
  const auto gu = geo::gradient(mesh, u);
  const auto gv = geo::gradient(mesh, g);
  double value = 0.0;
  for (int k = 0; k < mesh.cell_count(); ++k) {
    const double q = A[k].quad(gu[k]);
    if (q == 0.0) continue;  // integrand vanishes in the limit for p > 1
    value += sigma[k] * std::pow(q, 0.5 * p - 1.0) * dot(A[k].apply(gu[k]), gv[k]) *
             mesh.cell_areas()[k];
  }
  return value;
}

Pairing dn_pairing(const Mesh& mesh, const ScalarField& sigma, const MatrixField& A, double p,
                   const std::vector<double>& f, const std::vector<double>& g,
                   const SolverOptions& opts) {
  Pairing result;
  result.solution = fwd::solve_dirichlet(mesh, sigma, A, p, f, opts);
  result.value = pairing_value(mesh, sigma, A, p, result.solution.u, g);
  return result;
}

bool Table::ok() const {
  for (const auto& e : row_errors)
    if (!e.empty()) return false;
  return true;
}

Table dn_table(const Mesh& mesh, const ScalarField& sigma, const MatrixField& A, double p,
               const BoundaryDictionary& dict, const SolverOptions& opts, int threads) {
  dict.validate(mesh);
  const int m = dict.size();
  Table table;
  table.labels.reserve(m);
  for (const auto& e : dict.entries) table.labels.push_back(e.label);
  table.values.assign(m, std::vector<double>(m, std::numeric_limits<double>::quiet_NaN()));
  table.energies.assign(m, std::numeric_limits<double>::quiet_NaN());
  table.row_errors.assign(m, "");

  parallel_for(m, threads, [&](int i) {
    try {
      const auto sol = fwd::solve_dirichlet(mesh, sigma, A, p, dict.entries[i].values, opts);
      table.energies[i] = sol.energy;
      for (int j = 0; j < m; ++j)
        table.values[i][j] = pairing_value(mesh, sigma, A, p, sol.u, dict.entries[j].values);
    } catch (const fwd::ConvergenceFailure& e) {
      table.row_errors[i] = e.what();
    }
  });
  return table;
}

std::vector<double> boundary_bump(const Mesh& mesh, double s0, double half_width) {
  if (!(half_width > 0.0)) throw std::invalid_argument("boundary_bump: width must be positive");
  const auto& cycle = mesh.boundary_cycle();
  const auto& arc = mesh.boundary_arclength();
  const double perim = mesh.boundary_perimeter();
  std::vector<double> f(mesh.vertex_count(), 0.0);
  for (size_t i = 0; i < cycle.size(); ++i) {
    double d = std::abs(arc[i] - s0);
    d = std::min(d, perim - d);  // wrap around the cycle
    if (d < half_width) {
      const double t = d / half_width;
      const double c = std::cos(0.5 * kPi * t);
      f[cycle[i]] = c * c;
    }
  }
  return f;
}

BoundaryDictionary default_dictionary(const Mesh& mesh, int bumps, double width_factor,
                                      bool include_linears) {
  BoundaryDictionary dict;
  if (include_linears) {
    auto nodal = [&](auto fn, const char* label) {
      std::vector<double> v(mesh.vertex_count());
      for (int i = 0; i < mesh.vertex_count(); ++i) v[i] = fn(mesh.vertices()[i]);
      dict.entries.push_back({label, std::move(v)});
    };
    nodal([](geo::Vec2 p) { return p.x; }, "x1");
    nodal([](geo::Vec2 p) { return p.y; }, "x2");
    nodal([](geo::Vec2 p) { return p.x + p.y; }, "x1+x2");
    nodal([](geo::Vec2 p) { return p.x - p.y; }, "x1-x2");
  }
  if (bumps > 0) {
    const double perim = mesh.boundary_perimeter();
    const double half_width = width_factor * perim / bumps;
    for (int k = 0; k < bumps; ++k) {
      const double s0 = (k + 0.5) * perim / bumps;
      dict.entries.push_back({"bump" + std::to_string(k), boundary_bump(mesh, s0, half_width)});
    }
  }
  dict.validate(mesh);
  return dict;
}

}  // namespace plap::dn
