#include "perturbation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "parallel.hpp"
#include "rng.hpp"

namespace plap::perturb {

namespace {

using geo::Vec2;

double lp_norm(const Mesh& mesh, const std::vector<Vec2>& g, double p) {
  double s = 0.0;
  for (int k = 0; k < mesh.cell_count(); ++k)
    s += std::pow(norm(g[k]), p) * mesh.cell_areas()[k];
  return std::pow(s, 1.0 / p);
}

}  // namespace

std::vector<double> default_eps_ladder() { return {1e-1, 3e-2, 1e-2, 3e-3, 1e-3}; }

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("loglog_slope: need >= 2 pairs");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0))
      throw std::invalid_argument("loglog_slope: nonpositive sample");
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

StabilityStudy gradient_stability_study(const Mesh& mesh, const ScalarField& sigma0,
                                        const MatrixField& A0, double p,
                                        const std::vector<double>& f,
                                        const std::vector<double>& dsigma,
                                        const std::vector<SymMat2>& dA,
                                        const std::vector<double>& eps_ladder,
                                        const SolverOptions& opts, int threads) {
  if (eps_ladder.empty()) throw std::invalid_argument("stability study: empty ladder");
  for (size_t i = 0; i < eps_ladder.size(); ++i) {
    if (!(eps_ladder[i] > 0.0))
      throw std::invalid_argument("stability study: ladder entries must be positive");
    if (i > 0 && !(eps_ladder[i] < eps_ladder[i - 1]))
      throw std::invalid_argument("stability study: ladder must be strictly decreasing");
  }
  if (dsigma.size() != static_cast<size_t>(mesh.cell_count()) ||
      dA.size() != static_cast<size_t>(mesh.cell_count()))
    throw std::invalid_argument("stability study: perturbation size mismatch");

  // validate the coefficient classes for every ladder entry up front
  for (size_t i = 0; i < eps_ladder.size(); ++i) {
    const double eps = eps_ladder[i];
    for (int k = 0; k < mesh.cell_count(); ++k) {
      if (!(sigma0[k] + eps * dsigma[k] > 0.0))
        throw std::invalid_argument("stability study: sigma leaves the positive class at ladder entry " +
                                    std::to_string(i) + " (eps = " + std::to_string(eps) + ")");
      const SymMat2 a = A0[k] + eps * dA[k];
      if (!(a.eig_min() > 0.0))
        throw std::invalid_argument("stability study: A leaves the SPD class at ladder entry " +
                                    std::to_string(i) + " (eps = " + std::to_string(eps) + ")");
    }
  }

  StabilityStudy study;
  study.eps_ladder = eps_ladder;
  study.bound_exponent = std::min(1.0 / (p - 1.0), 1.0);

  const auto sol0 = fwd::solve_dirichlet(mesh, sigma0, A0, p, f, opts);
  const auto g0 = geo::gradient(mesh, sol0.u);
  const double g0_lp = lp_norm(mesh, g0, p);

  const int m = static_cast<int>(eps_ladder.size());
  study.lp_ratios.assign(m, 0.0);
  study.sup_norms.assign(m, 0.0);
  std::vector<double> grad_ratios(m, 0.0);
  std::vector<uint8_t> identity_ok(m, 1);

  parallel_for(m, threads, [&](int i) {
    const double eps = eps_ladder[i];
    std::vector<double> sig(mesh.cell_count());
    std::vector<SymMat2> mats(mesh.cell_count());
    for (int k = 0; k < mesh.cell_count(); ++k) {
      sig[k] = sigma0[k] + eps * dsigma[k];
      mats[k] = A0[k] + eps * dA[k];
    }
    const ScalarField sigma1(std::move(sig));
    const MatrixField A1(std::move(mats));
    const auto sol1 = fwd::solve_dirichlet(mesh, sigma1, A1, p, f, opts);
    const auto g1 = geo::gradient(mesh, sol1.u);

    std::vector<Vec2> diff(mesh.cell_count());
    double sup = 0.0;
    for (int k = 0; k < mesh.cell_count(); ++k) {
      diff[k] = g1[k] - g0[k];
      sup = std::max(sup, norm(diff[k]));
    }
    study.lp_ratios[i] = g0_lp > 0.0 ? lp_norm(mesh, diff, p) / g0_lp : 0.0;
    study.sup_norms[i] = sup;
    grad_ratios[i] = g0_lp > 0.0 ? lp_norm(mesh, g1, p) / g0_lp : 0.0;

    if (p >= 2.0) {
      // proof identity: (|g1|+|g0|)^(p-2) |g1-g0|^2 dominates |g1-g0|^p cellwise
      double lhs = 0.0, rhs = 0.0;
      for (int k = 0; k < mesh.cell_count(); ++k) {
        const double s = norm(g1[k]) + norm(g0[k]);
        const double d = norm(diff[k]);
        lhs += std::pow(s, p - 2.0) * d * d * mesh.cell_areas()[k];
        rhs += std::pow(d, p) * mesh.cell_areas()[k];
      }
      identity_ok[i] = lhs + 1e-12 * (1.0 + std::abs(lhs)) >= rhs ? 1 : 0;
    }
  });

  study.identity_checked = p >= 2.0;
  for (int i = 0; i < m; ++i) study.identity_ok = study.identity_ok && identity_ok[i];
  study.max_grad_norm_ratio = *std::max_element(grad_ratios.begin(), grad_ratios.end());

  bool all_positive = true;
  for (double r : study.lp_ratios) all_positive = all_positive && r > 0.0;
  if (all_positive) {
    study.fitted_exponent_lp = loglog_slope(eps_ladder, study.lp_ratios);
    for (int i = 0; i < m; ++i)
      study.c_fit = std::max(study.c_fit,
                             study.lp_ratios[i] / std::pow(eps_ladder[i], study.bound_exponent));
  }
  bool sup_positive = true;
  for (double s : study.sup_norms) sup_positive = sup_positive && s > 0.0;
  if (sup_positive) study.fitted_exponent_sup = loglog_slope(eps_ladder, study.sup_norms);
  return study;
}

NonvanishingReport nonvanishing_gradient_solution(const Mesh& mesh, const ScalarField& sigma,
                                                  const MatrixField& A, double p,
                                                  const SolverOptions& opts) {
  std::vector<double> f(mesh.vertex_count());
  for (int v = 0; v < mesh.vertex_count(); ++v) f[v] = mesh.vertices()[v].x;

  NonvanishingReport report;
  report.solution = fwd::solve_dirichlet(mesh, sigma, A, p, f, opts);
  const auto g = geo::gradient(mesh, report.solution.u);
  report.min_gradient_norm = std::numeric_limits<double>::infinity();
  for (int k = 0; k < mesh.cell_count(); ++k)
    report.min_gradient_norm = std::min(report.min_gradient_norm, norm(g[k]));

  double dsig = 0.0, dmat = 0.0;
  for (int k = 0; k < mesh.cell_count(); ++k) {
    dsig = std::max(dsig, std::abs(sigma[k] - 1.0));
    const SymMat2 d = A[k] - SymMat2::identity();
    dmat = std::max(dmat, std::max(std::abs(d.eig_min()), std::abs(d.eig_max())));
  }
  report.perturbation_size = dsig + dmat;
  report.assertion_applies = report.perturbation_size <= kCalibratedNonvanishingEps;
  if (report.assertion_applies && report.min_gradient_norm < 0.5)
    throw std::logic_error("nonvanishing_gradient_solution: min |grad u| = " +
                           std::to_string(report.min_gradient_norm) +
                           " fell below 1/2 inside the calibrated perturbation range");
  return report;
}

EpsCalibration calibrate_eps(const Mesh& mesh, double p, const std::vector<double>& ladder,
                             int directions, uint64_t seed, const SolverOptions& opts,
                             int threads) {
  if (ladder.empty()) throw std::invalid_argument("calibrate_eps: empty ladder");
  if (directions < 1) throw std::invalid_argument("calibrate_eps: need at least one direction");

  // seeded perturbation directions with unit size. Alternates smooth random
  // cellwise shifts (with a constant symmetric A shift) and box-localized
  // sigma contrasts; the localized ones drive the breakdown.
  struct Direction {
    std::vector<double> dsigma;
    SymMat2 dA;
  };
  std::vector<Direction> dirs(directions);
  rng::Stream stream(seed, "calibrate-eps");
  for (int di = 0; di < directions; ++di) {
    auto& d = dirs[di];
    d.dsigma.assign(mesh.cell_count(), 0.0);
    if (di % 2 == 0) {
      for (auto& v : d.dsigma) v = stream.uniform(-1.0, 1.0);
      d.dA = {stream.uniform(-0.5, 0.5), stream.uniform(-0.5, 0.5), stream.uniform(-0.5, 0.5)};
    } else {
      const double cx = stream.uniform(0.2, 0.8), cy = stream.uniform(0.2, 0.8);
      const double half = stream.uniform(0.05, 0.2);
      const double sign = stream.uniform(0, 1) < 0.5 ? -1.0 : 1.0;
      for (int k = 0; k < mesh.cell_count(); ++k) {
        const auto c = mesh.centroid(k);
        if (std::abs(c.x - cx) <= half && std::abs(c.y - cy) <= half) d.dsigma[k] = sign;
      }
      d.dA = {0.0, 0.0, 0.0};
    }
    // normalize so that ||dsigma||_inf + ||dA||_2 = 1
    double ds = 0.0;
    for (double v : d.dsigma) ds = std::max(ds, std::abs(v));
    const double da = std::max(std::abs(d.dA.eig_min()), std::abs(d.dA.eig_max()));
    const double total = ds + da;
    if (total == 0.0) continue;
    for (auto& v : d.dsigma) v /= total;
    d.dA = (1.0 / total) * d.dA;
  }

  EpsCalibration cal;
  cal.p = p;
  cal.ladder = ladder;
  cal.min_gradients.assign(ladder.size(), std::numeric_limits<double>::infinity());

  std::vector<double> f(mesh.vertex_count());
  for (int v = 0; v < mesh.vertex_count(); ++v) f[v] = mesh.vertices()[v].x;

  const int total = static_cast<int>(ladder.size()) * directions;
  std::mutex merge;
  parallel_for(total, threads, [&](int idx) {
    const int li = idx / directions;
    const auto& d = dirs[idx % directions];
    const double eps = ladder[li];
    std::vector<double> sig(mesh.cell_count());
    std::vector<SymMat2> mats(mesh.cell_count());
    for (int k = 0; k < mesh.cell_count(); ++k) {
      sig[k] = 1.0 + eps * d.dsigma[k];
      mats[k] = SymMat2::identity() + eps * d.dA;
      if (!(sig[k] > 0.0) || !(mats[k].eig_min() > 0.0)) {
        // the perturbation leaves the coefficient class: counts as breakdown
        std::lock_guard<std::mutex> lock(merge);
        cal.min_gradients[li] = 0.0;
        return;
      }
    }
    const auto sol = fwd::solve_dirichlet(mesh, ScalarField(std::move(sig)),
                                          MatrixField(std::move(mats)), p, f, opts);
    const auto g = geo::gradient(mesh, sol.u);
    double mn = std::numeric_limits<double>::infinity();
    for (int k = 0; k < mesh.cell_count(); ++k) mn = std::min(mn, norm(g[k]));
    std::lock_guard<std::mutex> lock(merge);
    cal.min_gradients[li] = std::min(cal.min_gradients[li], mn);
  });

  cal.eps_star = 0.0;
  for (size_t i = 0; i < ladder.size(); ++i)
    if (cal.min_gradients[i] >= 0.5) cal.eps_star = std::max(cal.eps_star, ladder[i]);
  return cal;
}

InterpolationCheck interpolation_check(const std::vector<double>& f, const Mesh& mesh, double p,
                                       double beta, double theta) {
  if (!(beta > 0.0) || !(beta < 1.0))
    throw std::invalid_argument("interpolation_check: beta must lie in (0,1)");
  const double n_over_p = 2.0 / p;
  const double theta_min = n_over_p / (beta + n_over_p);
  if (!(theta > theta_min) || !(theta <= 1.0))
    throw std::invalid_argument("interpolation_check: theta must lie in (" +
                                std::to_string(theta_min) + ", 1]");
  if (f.size() != static_cast<size_t>(mesh.vertex_count()))
    throw std::invalid_argument("interpolation_check: nodal size mismatch");

  InterpolationCheck result;
  for (double v : f) result.lhs = std::max(result.lhs, std::abs(v));
  double m0p = 0.0;
  for (int v = 0; v < mesh.vertex_count(); ++v)
    m0p += mesh.lumped_vertex_areas()[v] * std::pow(std::abs(f[v]), p);
  result.m0 = std::pow(m0p, 1.0 / p);
  const auto holder = field::holder_report(f, mesh, beta);
  result.m1 = holder.c_norm();
  result.rhs = std::pow(result.m0, 1.0 - theta) * std::pow(result.m1, theta);
  result.ratio = result.rhs > 0.0 ? result.lhs / result.rhs : 0.0;
  return result;
}

}  // namespace plap::perturb
