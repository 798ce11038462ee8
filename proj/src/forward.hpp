#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "fields.hpp"
#include "geometry.hpp"

namespace plap::fwd {

using field::MatrixField;
using field::ScalarField;
using geo::Mesh;

// Dirichlet problem for div(sigma |A grad(u) . grad(u)|^((p-2)/2) A grad(u)) = 0
// with u = f on the boundary vertices. Only the boundary values of f bind;
// its interior values seed the solver.
struct DirichletProblem {
  const Mesh* mesh = nullptr;
  const ScalarField* sigma = nullptr;
  const MatrixField* A = nullptr;
  double p = 2.0;
  const std::vector<double>* f = nullptr;
};

struct SolverOptions {
  double tol_rel = 1e-10;       // tolerance = tol_rel * (energy of f-extension + 1)
  double tol_abs = 0.0;         // overrides the relative rule when positive
  int max_iterations = 200;     // per continuation stage
  std::vector<double> eps_schedule;  // empty -> default for p

  // Default continuation: {1e-1, ..., 1e-8}, with a final exact stage
  // (eps = 0) appended when p >= 2. For p < 2 the energy is non-smooth at
  // zero gradient, so the last regularized stage is kept.
  static std::vector<double> default_schedule(double p);
};

struct Solution {
  std::vector<double> u;
  double energy = 0.0;            // p-Dirichlet energy of u (unregularized)
  double residual_norm = 0.0;     // interior residual at the final stage
  int iterations = 0;             // Newton iterations over all stages
  double regularization_eps = 0.0;
  double tolerance = 0.0;
  // regularized energy at the end of each continuation stage; nonincreasing
  std::vector<double> stage_energies;
};

class ConvergenceFailure : public std::runtime_error {
 public:
  ConvergenceFailure(const std::string& msg, Solution best)
      : std::runtime_error(msg), best_iterate(std::move(best)) {}
  Solution best_iterate;
};

// E(v) = sum_T sigma_T (eps^2 + A_T g_T . g_T)^(p/2) |T|, exact on the
// piecewise-linear space. eps = 0 gives the p-Dirichlet energy.
double p_energy(const Mesh& mesh, const ScalarField& sigma, const MatrixField& A, double p,
                const std::vector<double>& v, double eps = 0.0);

// Gradient of the regularized energy with respect to nodal values;
// boundary rows are zeroed.
std::vector<double> energy_gradient(const Mesh& mesh, const ScalarField& sigma,
                                    const MatrixField& A, double p, const std::vector<double>& v,
                                    double eps);

// Damped Newton with Armijo backtracking on the regularized energy,
// continued over the eps schedule; falls back to a gradient step when the
// Newton system is not positive definite.
Solution solve_dirichlet(const Mesh& mesh, const ScalarField& sigma, const MatrixField& A,
                         double p, const std::vector<double>& f, const SolverOptions& opts = {});
Solution solve_dirichlet(const DirichletProblem& problem, const SolverOptions& opts = {});

// Area fraction of cells whose Euclidean gradient norm is below threshold.
double critical_fraction(const Mesh& mesh, const std::vector<double>& u, double threshold);

}  // namespace plap::fwd
