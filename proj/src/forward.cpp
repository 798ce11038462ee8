#include "forward.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <cmath>

namespace plap::fwd {

namespace {

using geo::Vec2;

void check_problem(const Mesh& mesh, const ScalarField& sigma, const MatrixField& A, double p,
                   const std::vector<double>& v) {
  if (!(p > 1.0)) throw std::invalid_argument("forward: p must be greater than 1");
  if (sigma.size() != mesh.cell_count() || A.size() != mesh.cell_count())
    throw std::invalid_argument("forward: coefficient field size does not match mesh");
  if (v.size() != static_cast<size_t>(mesh.vertex_count()))
    throw std::invalid_argument("forward: nodal function size does not match mesh");
}

double interior_norm(const std::vector<double>& r) {
  double s = 0.0;
  for (double x : r) s += x * x;
  return std::sqrt(s);
}

}  // namespace

std::vector<double> SolverOptions::default_schedule(double p) {
  std::vector<double> eps;
  for (int k = 1; k <= 8; ++k) eps.push_back(std::pow(10.0, -k));
  if (p >= 2.0) eps.push_back(0.0);
  return eps;
}

double p_energy(const Mesh& mesh, const ScalarField& sigma, const MatrixField& A, double p,
                const std::vector<double>& v, double eps) {
  check_problem(mesh, sigma, A, p, v);
  const auto g = geo::gradient(mesh, v);
  double energy = 0.0;
  for (int k = 0; k < mesh.cell_count(); ++k) {
    const double q = eps * eps + A[k].quad(g[k]);
    energy += sigma[k] * std::pow(q, 0.5 * p) * mesh.cell_areas()[k];
  }
  return energy;
}

std::vector<double> energy_gradient(const Mesh& mesh, const ScalarField& sigma,
                                    const MatrixField& A, double p, const std::vector<double>& v,
                                    double eps) {
  check_problem(mesh, sigma, A, p, v);
  if (eps < 0.0) throw std::invalid_argument("forward: eps must be nonnegative");
  const auto g = geo::gradient(mesh, v);
  std::vector<double> r(mesh.vertex_count(), 0.0);
  for (int k = 0; k < mesh.cell_count(); ++k) {
    const double q = eps * eps + A[k].quad(g[k]);
    if (q == 0.0) continue;  // zero flux in the degenerate cell (valid for p > 1)
    const double w = sigma[k] * p * std::pow(q, 0.5 * p - 1.0) * mesh.cell_areas()[k];
    const Vec2 flux = A[k].apply(g[k]);
    const auto& t = mesh.triangles()[k].v;
    const auto& bg = mesh.basis_gradients(k);
    for (int i = 0; i < 3; ++i) r[t[i]] += w * dot(flux, bg[i]);
  }
  for (int i = 0; i < mesh.vertex_count(); ++i)
    if (mesh.is_boundary_vertex(i)) r[i] = 0.0;
  return r;
}

namespace {

// Hessian of the regularized energy with boundary rows/columns replaced by
// the identity. Positive semidefinite for every p > 1 (Cauchy-Schwarz in
// the A inner product), definite wherever eps > 0.
Eigen::SparseMatrix<double> energy_hessian(const Mesh& mesh, const ScalarField& sigma,
                                           const MatrixField& A, double p,
                                           const std::vector<double>& v, double eps) {
  const auto g = geo::gradient(mesh, v);
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<size_t>(mesh.cell_count()) * 9 + mesh.vertex_count());
  for (int k = 0; k < mesh.cell_count(); ++k) {
    const double q = eps * eps + A[k].quad(g[k]);
    // degenerate cells: no curvature for p > 2 (limit), unbounded for p < 2
    // (the solver keeps eps > 0 there); p = 2 reduces to the stiffness term
    if (q == 0.0 && p != 2.0) continue;
    const double base = sigma[k] * p * mesh.cell_areas()[k];
    const double c1 = base * std::pow(q, 0.5 * p - 1.0);  // pow(0,0) = 1 covers p = 2
    const double c2 = (q > 0.0) ? base * (p - 2.0) * std::pow(q, 0.5 * p - 2.0) : 0.0;
    const Vec2 flux = A[k].apply(g[k]);
    const auto& t = mesh.triangles()[k].v;
    const auto& bg = mesh.basis_gradients(k);
    for (int i = 0; i < 3; ++i) {
      const bool bi = mesh.is_boundary_vertex(t[i]);
      for (int j = 0; j < 3; ++j) {
        if (bi || mesh.is_boundary_vertex(t[j])) continue;
        const double h = c1 * dot(A[k].apply(bg[j]), bg[i]) + c2 * dot(flux, bg[i]) * dot(flux, bg[j]);
        trip.emplace_back(t[i], t[j], h);
      }
    }
  }
  for (int i = 0; i < mesh.vertex_count(); ++i)
    if (mesh.is_boundary_vertex(i)) trip.emplace_back(i, i, 1.0);
  Eigen::SparseMatrix<double> H(mesh.vertex_count(), mesh.vertex_count());
  H.setFromTriplets(trip.begin(), trip.end());
  return H;
}

}  // namespace

Solution solve_dirichlet(const Mesh& mesh, const ScalarField& sigma, const MatrixField& A,
                         double p, const std::vector<double>& f, const SolverOptions& opts) {
  check_problem(mesh, sigma, A, p, f);
  if (!(opts.tol_rel > 0.0) && !(opts.tol_abs > 0.0))
    throw std::invalid_argument("forward: tolerance must be positive");

  std::vector<double> u = f;  // initial iterate: the given extension of f
  const int nv = mesh.vertex_count();
  const double scale = p_energy(mesh, sigma, A, p, u, 0.0) + 1.0;
  const double tol = opts.tol_abs > 0.0 ? opts.tol_abs : opts.tol_rel * scale;
  const auto schedule =
      opts.eps_schedule.empty() ? SolverOptions::default_schedule(p) : opts.eps_schedule;

  Solution sol;
  sol.tolerance = tol;
  int total_iterations = 0;
  double residual = 0.0;

  for (double eps : schedule) {
    auto r = energy_gradient(mesh, sigma, A, p, u, eps);
    residual = interior_norm(r);
    int it = 0;
    bool stuck = false;
    while (residual > tol && it < opts.max_iterations && !stuck) {
      Eigen::VectorXd rhs(nv);
      for (int i = 0; i < nv; ++i) rhs[i] = -r[i];

      Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
      ldlt.compute(energy_hessian(mesh, sigma, A, p, u, eps));
      Eigen::VectorXd d;
      bool newton_ok = ldlt.info() == Eigen::Success;
      if (newton_ok) {
        d = ldlt.solve(rhs);
        newton_ok = ldlt.info() == Eigen::Success && d.allFinite() && d.dot(rhs) > 0.0;
      }
      if (!newton_ok) d = rhs;  // gradient descent fallback

      // Armijo backtracking, guaranteed to terminate on a descent direction
      const double e0 = p_energy(mesh, sigma, A, p, u, eps);
      const double slope = -d.dot(rhs);  // grad . d, negative
      const double fp_floor = 1e-12 * (std::abs(e0) + 1.0);
      double alpha = 1.0;
      std::vector<double> trial(u);
      bool accepted = false;
      while (alpha > 1e-18) {
        for (int i = 0; i < nv; ++i) trial[i] = u[i] + alpha * d[i];
        const double e1 = p_energy(mesh, sigma, A, p, trial, eps);
        const double sufficient = -1e-4 * alpha * slope;
        const double decrease = e0 - e1;
        // take the step on a sufficient decrease, or when the predicted
        // decrease falls below the energy's floating-point resolution and
        // the energy does not increase measurably
        if (decrease >= sufficient || (sufficient < fp_floor && decrease > -fp_floor)) {
          accepted = true;
          break;
        }
        alpha *= 0.5;
      }
      if (!accepted) {
        stuck = true;  // no decrease representable; iterate is numerically optimal
        break;
      }
      u.swap(trial);
      ++it;
      ++total_iterations;
      r = energy_gradient(mesh, sigma, A, p, u, eps);
      residual = interior_norm(r);
    }
    if (residual > tol) {
      Solution best;
      best.u = u;
      best.energy = p_energy(mesh, sigma, A, p, u, 0.0);
      best.residual_norm = residual;
      best.iterations = total_iterations;
      best.regularization_eps = eps;
      best.tolerance = tol;
      best.stage_energies = sol.stage_energies;
      throw ConvergenceFailure("solve_dirichlet: no convergence at eps = " + std::to_string(eps) +
                                   " (residual " + std::to_string(residual) + ")",
                               std::move(best));
    }
    sol.regularization_eps = eps;
    sol.stage_energies.push_back(p_energy(mesh, sigma, A, p, u, eps));
  }

  sol.u = std::move(u);
  sol.energy = p_energy(mesh, sigma, A, p, sol.u, 0.0);
  sol.residual_norm = residual;
  sol.iterations = total_iterations;
  return sol;
}

Solution solve_dirichlet(const DirichletProblem& problem, const SolverOptions& opts) {
  return solve_dirichlet(*problem.mesh, *problem.sigma, *problem.A, problem.p, *problem.f, opts);
}

double critical_fraction(const Mesh& mesh, const std::vector<double>& u, double threshold) {
  if (threshold < 0.0) throw std::invalid_argument("critical_fraction: threshold must be nonnegative");
  const auto g = geo::gradient(mesh, u);
  double area = 0.0;
  for (int k = 0; k < mesh.cell_count(); ++k)
    if (norm(g[k]) < threshold) area += mesh.cell_areas()[k];
  return area / mesh.total_area();
}

}  // namespace plap::fwd
