#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "dnmap.hpp"

namespace plap::mono {

using dn::BoundaryDictionary;
using field::MatrixField;
using field::ScalarField;
using fwd::SolverOptions;
using geo::Mesh;

// The two-sided monotonicity bound for one boundary datum: with u2 the
// sigma2-solution,
//   lower  = (p-1) int (sigma2 / sigma1^(1/(p-1)))
//                      (sigma1^(1/(p-1)) - sigma2^(1/(p-1))) |A gu2.gu2|^(p/2)
//   middle = <(Lambda_sigma1 - Lambda_sigma2) f, f>
//   upper  = int (sigma1 - sigma2) |A gu2.gu2|^(p/2)
// When sigma1 >= sigma2 cellwise, lower <= middle <= upper up to solver
// tolerance and all terms are nonnegative; under the reversed ordering all
// terms are nonpositive.
struct MonotonicityTriple {
  double lower = 0.0;
  double middle = 0.0;
  double upper = 0.0;
  std::string f_id;
};

MonotonicityTriple monotonicity_triple(const Mesh& mesh, const ScalarField& sigma1,
                                       const ScalarField& sigma2, const MatrixField& A, double p,
                                       const std::vector<double>& f,
                                       const SolverOptions& opts = {}, const std::string& f_id = "");

// Evaluates beta -> (1+beta)^(p') / beta on the grid (p' = p/(p-1)) and
// reports the argmin; the minimum lies at beta = p-1, which the check
// asserts whenever the grid contains that point.
struct BetaTable {
  std::vector<double> betas;
  std::vector<double> values;
  int argmin = 0;
  double p = 2.0;

  double beta_at_min() const { return betas[argmin]; }
};

BetaTable beta_optimality_check(double p, const std::vector<double>& beta_grid);

// Quantitative contrapositive of monotonicity-based uniqueness: ordered
// conductivities differing on a cell set E must produce a positive DN gap
// for boundary data whose sigma2-solution has gradient energy in E.
struct UniquenessEntry {
  std::string f_id;
  double middle = 0.0;
  double lower_bound_on_difference_set = 0.0;
};

struct UniquenessReport {
  std::vector<UniquenessEntry> entries;
  double max_middle = 0.0;
  double max_lower_bound = 0.0;
  double gap_tolerance = 0.0;
  bool distinguishable = false;
  int difference_cell_count = 0;
};

UniquenessReport uniqueness_experiment(const Mesh& mesh, const ScalarField& sigma1,
                                       const ScalarField& sigma2, const MatrixField& A, double p,
                                       const BoundaryDictionary& dict,
                                       const SolverOptions& opts = {}, int threads = 1);

struct DifferenceRegionEstimate {
  std::vector<double> cell_scores;   // nonnegative
  std::vector<uint8_t> detected;     // score > threshold
  double threshold = 0.0;
  double quantile = 0.9;
  std::vector<std::string> labels;
  std::vector<double> normalized_gaps;
};

struct DetectorOptions {
  double quantile = 0.9;
  double gap_rel_tol = 1e-6;  // normalized gaps at or below this count as zero
  SolverOptions solver;
  int threads = 1;
};

// Monotonicity-based estimate of E = {sigma1 > sigma2} from measured DN
// diagonal values for the hidden sigma1. For each probe f the normalized
// gap ghat(f) = (<Lambda_1 f,f> - <Lambda_2 f,f>) / <Lambda_2 f,f> is
// attributed to cells by correlating it with the probe-wise gradient-energy
// fractions e_T(f) of the sigma2-solutions:
//   score_T = max(0, sum_f ghat(f) e_T(f)) / ||e_T(.)||_2.
// Cells are flagged by thresholding scores at the given quantile.
DifferenceRegionEstimate detect_difference_region(const Mesh& mesh,
                                                  const std::map<std::string, double>& oracle_diag,
                                                  const ScalarField& sigma2, const MatrixField& A,
                                                  double p, const BoundaryDictionary& dict,
                                                  const DetectorOptions& opts = {});

double jaccard(const std::vector<uint8_t>& a, const std::vector<uint8_t>& b);

}  // namespace plap::mono
