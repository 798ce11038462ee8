#include "monotonicity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "parallel.hpp"

namespace plap::mono {

namespace {

void check_pair(const Mesh& mesh, const ScalarField& sigma1, const ScalarField& sigma2) {
  if (sigma1.size() != mesh.cell_count() || sigma2.size() != mesh.cell_count())
    throw std::invalid_argument("monotonicity: field size does not match mesh");
}

}  // namespace

MonotonicityTriple monotonicity_triple(const Mesh& mesh, const ScalarField& sigma1,
                                       const ScalarField& sigma2, const MatrixField& A, double p,
                                       const std::vector<double>& f, const SolverOptions& opts,
                                       const std::string& f_id) {
  check_pair(mesh, sigma1, sigma2);
  MonotonicityTriple t;
  t.f_id = f_id;

  const auto u2 = fwd::solve_dirichlet(mesh, sigma2, A, p, f, opts);
  const auto g2 = geo::gradient(mesh, u2.u);

  const double r = 1.0 / (p - 1.0);
  for (int k = 0; k < mesh.cell_count(); ++k) {
    const double q = std::pow(A[k].quad(g2[k]), 0.5 * p);
    const double s1r = std::pow(sigma1[k], r);
    const double s2r = std::pow(sigma2[k], r);
    t.lower += (p - 1.0) * (sigma2[k] / s1r) * (s1r - s2r) * q * mesh.cell_areas()[k];
    t.upper += (sigma1[k] - sigma2[k]) * q * mesh.cell_areas()[k];
  }

  // middle as a difference of two full pairings, exercising both solves
  const double pair2 = dn::pairing_value(mesh, sigma2, A, p, u2.u, f);
  const auto pair1 = dn::dn_pairing(mesh, sigma1, A, p, f, f, opts);
  t.middle = pair1.value - pair2;
  return t;
}

BetaTable beta_optimality_check(double p, const std::vector<double>& beta_grid) {
  if (!(p > 1.0)) throw std::invalid_argument("beta_optimality_check: p must exceed 1");
  if (beta_grid.empty()) throw std::invalid_argument("beta_optimality_check: empty grid");
  BetaTable table;
  table.p = p;
  table.betas = beta_grid;
  table.values.reserve(beta_grid.size());
  const double pprime = p / (p - 1.0);
  for (double beta : beta_grid) {
    if (!(beta > 0.0)) throw std::invalid_argument("beta_optimality_check: beta must be positive");
    table.values.push_back(std::pow(1.0 + beta, pprime) / beta);
  }
  table.argmin = static_cast<int>(
      std::min_element(table.values.begin(), table.values.end()) - table.values.begin());

  // the grid minimum must sit at p-1 whenever the grid contains that point
  const double target = p - 1.0;
  double grid_step = std::numeric_limits<double>::infinity();
  for (size_t i = 1; i < beta_grid.size(); ++i)
    grid_step = std::min(grid_step, std::abs(beta_grid[i] - beta_grid[i - 1]));
  bool contains_target = false;
  for (double b : beta_grid)
    if (std::abs(b - target) <= 1e-9 * std::max(1.0, target)) contains_target = true;
  if (contains_target && std::abs(table.beta_at_min() - target) > grid_step + 1e-9)
    throw std::logic_error("beta_optimality_check: grid minimum is not at beta = p-1");
  return table;
}

UniquenessReport uniqueness_experiment(const Mesh& mesh, const ScalarField& sigma1,
                                       const ScalarField& sigma2, const MatrixField& A, double p,
                                       const BoundaryDictionary& dict, const SolverOptions& opts,
                                       int threads) {
  check_pair(mesh, sigma1, sigma2);
  dict.validate(mesh);
  std::vector<uint8_t> difference_cell(mesh.cell_count(), 0);
  for (int k = 0; k < mesh.cell_count(); ++k) {
    if (sigma1[k] < sigma2[k])
      throw std::invalid_argument("uniqueness_experiment: ordering sigma1 >= sigma2 violated at cell " +
                                  std::to_string(k));
    difference_cell[k] = sigma1[k] > sigma2[k] ? 1 : 0;
  }

  UniquenessReport report;
  report.difference_cell_count =
      static_cast<int>(std::count(difference_cell.begin(), difference_cell.end(), uint8_t{1}));
  report.entries.resize(dict.size());

  const double r = 1.0 / (p - 1.0);
  parallel_for(dict.size(), threads, [&](int i) {
    const auto& entry = dict.entries[i];
    auto triple = monotonicity_triple(mesh, sigma1, sigma2, A, p, entry.values, opts, entry.label);

    // certified bound: the lemma's lower term restricted to the cells of E
    const auto u2 = fwd::solve_dirichlet(mesh, sigma2, A, p, entry.values, opts);
    const auto g2 = geo::gradient(mesh, u2.u);
    double bound = 0.0;
    for (int k = 0; k < mesh.cell_count(); ++k) {
      if (!difference_cell[k]) continue;
      const double s1r = std::pow(sigma1[k], r);
      const double s2r = std::pow(sigma2[k], r);
      bound += (p - 1.0) * (sigma2[k] / s1r) * (s1r - s2r) *
               std::pow(A[k].quad(g2[k]), 0.5 * p) * mesh.cell_areas()[k];
    }
    report.entries[i] = {entry.label, triple.middle, bound};
  });

  double energy_scale = 0.0;
  for (const auto& e : report.entries) {
    report.max_middle = std::max(report.max_middle, e.middle);
    report.max_lower_bound = std::max(report.max_lower_bound, e.lower_bound_on_difference_set);
    energy_scale = std::max(energy_scale, std::abs(e.middle));
  }
  report.gap_tolerance = 1e-8 * (1.0 + energy_scale);
  report.distinguishable = report.max_middle > report.gap_tolerance;
  return report;
}

DifferenceRegionEstimate detect_difference_region(const Mesh& mesh,
                                                  const std::map<std::string, double>& oracle_diag,
                                                  const ScalarField& sigma2, const MatrixField& A,
                                                  double p, const BoundaryDictionary& dict,
                                                  const DetectorOptions& opts) {
  dict.validate(mesh);
  if (sigma2.size() != mesh.cell_count())
    throw std::invalid_argument("detect: sigma2 size does not match mesh");
  const int m = dict.size();
  const int nc = mesh.cell_count();
  for (const auto& e : dict.entries) {
    if (!oracle_diag.count(e.label))
      throw std::invalid_argument("detect: oracle table is missing entry '" + e.label + "'");
  }

  // per-probe normalized gap and gradient-energy fractions of the
  // sigma2-solutions
  std::vector<double> gaps(m, 0.0);
  std::vector<std::vector<double>> efrac(m, std::vector<double>(nc, 0.0));
  parallel_for(m, opts.threads, [&](int i) {
    const auto& entry = dict.entries[i];
    const auto sol = fwd::solve_dirichlet(mesh, sigma2, A, p, entry.values, opts.solver);
    const double reference = dn::pairing_value(mesh, sigma2, A, p, sol.u, entry.values);
    const auto g = geo::gradient(mesh, sol.u);
    double total = 0.0;
    for (int k = 0; k < nc; ++k) {
      const double e = sigma2[k] * std::pow(A[k].quad(g[k]), 0.5 * p) * mesh.cell_areas()[k];
      efrac[i][k] = e;
      total += e;
    }
    if (total > 0.0)
      for (int k = 0; k < nc; ++k) efrac[i][k] /= total;
    const double gap = oracle_diag.at(entry.label) - reference;
    double ghat = reference != 0.0 ? gap / reference : 0.0;
    if (ghat <= opts.gap_rel_tol) ghat = 0.0;  // below solver noise: treat as no gap
    gaps[i] = ghat;
  });

  DifferenceRegionEstimate est;
  est.quantile = opts.quantile;
  est.labels.reserve(m);
  for (const auto& e : dict.entries) est.labels.push_back(e.label);
  est.normalized_gaps = gaps;
  est.cell_scores.assign(nc, 0.0);
  for (int k = 0; k < nc; ++k) {
    double corr = 0.0, nrm2 = 0.0;
    for (int i = 0; i < m; ++i) {
      corr += gaps[i] * efrac[i][k];
      nrm2 += efrac[i][k] * efrac[i][k];
    }
    est.cell_scores[k] = nrm2 > 0.0 ? std::max(0.0, corr) / std::sqrt(nrm2) : 0.0;
  }

  std::vector<double> sorted = est.cell_scores;
  std::sort(sorted.begin(), sorted.end());
  const int idx = std::min<int>(nc - 1, static_cast<int>(std::floor(opts.quantile * nc)));
  est.threshold = sorted[idx];
  est.detected.assign(nc, 0);
  for (int k = 0; k < nc; ++k) est.detected[k] = est.cell_scores[k] > est.threshold ? 1 : 0;
  return est;
}

double jaccard(const std::vector<uint8_t>& a, const std::vector<uint8_t>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("jaccard: size mismatch");
  int inter = 0, uni = 0;
  for (size_t k = 0; k < a.size(); ++k) {
    const bool x = a[k] != 0, y = b[k] != 0;
    inter += (x && y) ? 1 : 0;
    uni += (x || y) ? 1 : 0;
  }
  return uni == 0 ? 1.0 : static_cast<double>(inter) / uni;
}

}  // namespace plap::mono
