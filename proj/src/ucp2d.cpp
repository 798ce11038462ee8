#include "ucp2d.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

namespace plap::ucp {

ComplexGradientField complex_gradient(const Mesh& mesh, const std::vector<double>& u,
                                      const ScalarField& sigma, double a) {
  if (!(a > -1.0)) throw std::invalid_argument("complex_gradient: exponent must exceed -1");
  if (sigma.size() != mesh.cell_count())
    throw std::invalid_argument("complex_gradient: sigma size mismatch");
  const auto g = geo::gradient(mesh, u);
  ComplexGradientField out;
  out.exponent_a = a;
  out.f.resize(mesh.cell_count());
  out.Fa.resize(mesh.cell_count());
  for (int k = 0; k < mesh.cell_count(); ++k) {
    const Complex f(sigma[k] * g[k].x, -sigma[k] * g[k].y);
    out.f[k] = f;
    const double mag = std::abs(f);
    out.Fa[k] = mag > 0.0 ? std::pow(mag, a) * f : Complex(0.0, 0.0);
  }
  return out;
}

BeltramiCoefficients beltrami_coefficients(double p) {
  if (!(p > 1.0)) throw std::invalid_argument("beltrami_coefficients: p must exceed 1");
  BeltramiCoefficients c;
  c.p = p;
  const double r1 = (p - 2.0) / (p + 2.0);
  const double r2 = (p - 2.0) / (3.0 * p - 2.0);
  c.q1_mag = 0.5 * std::abs(r1 + r2);
  c.q2_mag = 0.5 * std::abs(r2 - r1);
  return c;
}

namespace {

// least-squares fit F ~ F0 + alpha (z - z0) + beta conj(z - z0) over the
// cell and its edge-adjacent neighbors; returns (alpha, beta) = (dz F, dzbar F)
struct PlaneFit {
  Complex dz;
  Complex dzbar;
};

PlaneFit fit_cell_derivatives(const Mesh& mesh, const std::vector<Complex>& F, int cell) {
  std::vector<int> ids{cell};
  for (int nb : mesh.edge_neighbors(cell))
    if (nb >= 0) ids.push_back(nb);
  const geo::Vec2 c0 = mesh.centroid(cell);

  Eigen::MatrixXd A(2 * ids.size(), 6);
  Eigen::VectorXd b(2 * ids.size());
  for (size_t i = 0; i < ids.size(); ++i) {
    const geo::Vec2 c = mesh.centroid(ids[i]);
    const double dx = c.x - c0.x, dy = c.y - c0.y;
    A.row(2 * i) << 1, 0, dx, -dy, dx, dy;
    A.row(2 * i + 1) << 0, 1, dy, dx, -dy, dx;
    b[2 * i] = F[ids[i]].real();
    b[2 * i + 1] = F[ids[i]].imag();
  }
  const Eigen::VectorXd x = (A.transpose() * A).ldlt().solve(A.transpose() * b);
  return {Complex(x[2], x[3]), Complex(x[4], x[5])};
}

}  // namespace

std::vector<double> promote_sigma_to_vertices(const Mesh& mesh, const ScalarField& sigma) {
  std::vector<double> out(mesh.vertex_count(), 0.0);
  std::vector<double> w(mesh.vertex_count(), 0.0);
  for (int k = 0; k < mesh.cell_count(); ++k) {
    for (int v : mesh.triangles()[k].v) {
      out[v] += mesh.cell_areas()[k] * sigma[k];
      w[v] += mesh.cell_areas()[k];
    }
  }
  for (int v = 0; v < mesh.vertex_count(); ++v) out[v] /= w[v];
  return out;
}

BeltramiResidualReport beltrami_residual(const Mesh& mesh, const std::vector<double>& u,
                                         const std::vector<double>& sigma_vertex, double p) {
  if (!(p > 1.0)) throw std::invalid_argument("beltrami_residual: p must exceed 1");
  if (sigma_vertex.size() != static_cast<size_t>(mesh.vertex_count()))
    throw std::invalid_argument("beltrami_residual: sigma must be vertex-sampled");
  // neighborhood fits need a few interior layers (8 interior cells is the
  // structured mesh at four subdivisions per side)
  int interior_cells = 0;
  for (int k = 0; k < mesh.cell_count(); ++k)
    if (!mesh.cell_touches_boundary(k)) ++interior_cells;
  if (interior_cells < 8)
    throw std::invalid_argument("beltrami_residual: mesh too coarse for neighborhood fits");

  for (double s : sigma_vertex)
    if (!(s > 0.0)) throw std::invalid_argument("beltrami_residual: sigma must be positive");

  // cell sigma from vertex means; F with a = (p-2)/2
  const double a = 0.5 * (p - 2.0);
  std::vector<double> sigma_cell(mesh.cell_count());
  for (int k = 0; k < mesh.cell_count(); ++k) {
    const auto& t = mesh.triangles()[k].v;
    sigma_cell[k] = (sigma_vertex[t[0]] + sigma_vertex[t[1]] + sigma_vertex[t[2]]) / 3.0;
  }
  const auto cg = complex_gradient(mesh, u, ScalarField(sigma_cell), a);
  const auto& F = cg.Fa;

  // P1 gradients of the nodal fields 1/sigma and sigma^(2-p) give the exact
  // cell derivatives of their interpolants
  std::vector<double> inv_sigma(mesh.vertex_count());
  std::vector<double> sigma_pow(mesh.vertex_count());
  for (int v = 0; v < mesh.vertex_count(); ++v) {
    inv_sigma[v] = 1.0 / sigma_vertex[v];
    sigma_pow[v] = std::pow(sigma_vertex[v], 2.0 - p);  // = 1/sigma^(p-2)
  }
  const auto grad_inv = geo::gradient(mesh, inv_sigma);
  const auto grad_pow = geo::gradient(mesh, sigma_pow);

  double maxF = 0.0;
  for (const auto& f : F) maxF = std::max(maxF, std::abs(f));
  const double f_floor = 1e-12 * maxF;

  const double c1 = (p - 2.0) / (p + 2.0);
  const double c2 = (p - 2.0) / (3.0 * p - 2.0);

  BeltramiResidualReport report;
  double num = 0.0, den_dz = 0.0, den_f = 0.0;
  for (int k = 0; k < mesh.cell_count(); ++k) {
    if (mesh.cell_touches_boundary(k)) continue;
    if (std::abs(F[k]) <= f_floor) continue;  // phases F/conj(F) undefined at zeros
    const auto fit = fit_cell_derivatives(mesh, F, k);

    const Complex Fk = F[k];
    const Complex phase1 = std::conj(Fk) / Fk;
    const Complex q1 = -0.5 * (c1 + c2) * phase1;
    const Complex q2 = -0.5 * (c2 - c1) * (Fk / std::conj(Fk));

    // H(z,F) from the sigma derivative fields (dz g = (g_x - i g_y)/2)
    const double s = sigma_cell[k];
    const Complex dz_inv(0.5 * grad_inv[k].x, -0.5 * grad_inv[k].y);
    const Complex dzbar_inv = std::conj(dz_inv);
    const Complex dz_pow(0.5 * grad_pow[k].x, -0.5 * grad_pow[k].y);
    const Complex dzbar_pow = std::conj(dz_pow);
    const double sp = std::pow(s, p - 2.0);
    const Complex H = s * (p / (p + 2.0)) * (std::conj(Fk) * dz_inv - Fk * dzbar_inv) -
                      sp * (p / (3.0 * p - 2.0)) * (std::conj(Fk) * dz_pow + Fk * dzbar_pow);

    // |H| <= q3 |F| with q3 built from the same discrete derivatives
    const double q3 = 2.0 * s * (p / (p + 2.0)) * std::abs(dz_inv) +
                      2.0 * sp * (p / (3.0 * p - 2.0)) * std::abs(dz_pow);
    report.q3_sup = std::max(report.q3_sup, q3);
    const double slack = 1e-12 * (1.0 + q3 * std::abs(Fk));
    if (std::abs(H) > q3 * std::abs(Fk) + slack) {
      report.h_bound_ok = false;
      report.h_bound_max_violation =
          std::max(report.h_bound_max_violation, std::abs(H) - q3 * std::abs(Fk));
    }

    const Complex res = fit.dzbar - q1 * fit.dz - q2 * std::conj(fit.dz) - H;
    const double area = mesh.cell_areas()[k];
    num += std::norm(res) * area;
    den_dz += std::norm(fit.dz) * area;
    den_f += std::norm(Fk) * area;
    ++report.cells_used;
  }
  report.dzbar_norm = std::sqrt(num);
  report.dz_norm = std::sqrt(den_dz);
  report.f_norm = std::sqrt(den_f);
  const double den = report.dz_norm + report.f_norm;
  report.residual = den > 0.0 ? report.dzbar_norm / den : 0.0;
  return report;
}

StreamFunction dual_stream_function(const Mesh& mesh, const std::vector<double>& u,
                                    const ScalarField& sigma, double p) {
  if (!(p > 1.0)) throw std::invalid_argument("dual_stream_function: p must exceed 1");
  if (sigma.size() != mesh.cell_count())
    throw std::invalid_argument("dual_stream_function: sigma size mismatch");
  const auto g = geo::gradient(mesh, u);

  // flux W = sigma |grad u|^(p-2) grad u; target gradient of v is rot90(W)
  std::vector<Vec2> target(mesh.cell_count());
  std::vector<Vec2> flux(mesh.cell_count());
  for (int k = 0; k < mesh.cell_count(); ++k) {
    const double gn = norm(g[k]);
    const double w = gn > 0.0 ? sigma[k] * std::pow(gn, p - 2.0) : 0.0;
    flux[k] = w * g[k];
    target[k] = rot90(flux[k]);
  }

  // integrate the affine pieces along a BFS spanning tree rooted at cell 0,
  // matching values at shared edge midpoints
  std::vector<double> offset(mesh.cell_count(), 0.0);
  std::vector<uint8_t> seen(mesh.cell_count(), 0);
  std::queue<int> frontier;
  StreamFunction out;
  out.q = p / (p - 1.0);
  seen[0] = 1;
  offset[0] = -dot(target[0], mesh.centroid(0));
  frontier.push(0);
  int visited = 1;
  while (!frontier.empty()) {
    const int c = frontier.front();
    frontier.pop();
    const auto& t = mesh.triangles()[c].v;
    for (int e = 0; e < 3; ++e) {
      const int nb = mesh.edge_neighbors(c)[e];
      if (nb < 0 || seen[nb]) continue;
      const Vec2 a = mesh.vertices()[t[e]];
      const Vec2 b = mesh.vertices()[t[(e + 1) % 3]];
      const Vec2 mid = 0.5 * (a + b);
      offset[nb] = dot(target[c], mid) + offset[c] - dot(target[nb], mid);
      seen[nb] = 1;
      ++visited;
      frontier.push(nb);
    }
  }
  if (visited != mesh.cell_count())
    throw std::invalid_argument("dual_stream_function: mesh cell graph is disconnected");

  // path residual: worst mismatch of the affine pieces across non-tree edges
  for (int c = 0; c < mesh.cell_count(); ++c) {
    const auto& t = mesh.triangles()[c].v;
    for (int e = 0; e < 3; ++e) {
      const int nb = mesh.edge_neighbors(c)[e];
      if (nb < c) continue;
      const Vec2 mid = 0.5 * (mesh.vertices()[t[e]] + mesh.vertices()[t[(e + 1) % 3]]);
      const double mismatch =
          std::abs(dot(target[c], mid) + offset[c] - (dot(target[nb], mid) + offset[nb]));
      out.path_residual = std::max(out.path_residual, mismatch);
    }
  }

  // nodal v: average of the incident affine pieces at each vertex
  out.v.assign(mesh.vertex_count(), 0.0);
  for (int vtx = 0; vtx < mesh.vertex_count(); ++vtx) {
    const auto& cells = mesh.cells_around_vertex(vtx);
    double acc = 0.0;
    for (int c : cells) acc += dot(target[c], mesh.vertices()[vtx]) + offset[c];
    out.v[vtx] = acc / static_cast<double>(cells.size());
  }

  // dual q-harmonic residual of v under the weight sigma^(1-q)
  std::vector<double> dual_weight(mesh.cell_count());
  for (int k = 0; k < mesh.cell_count(); ++k)
    dual_weight[k] = std::pow(sigma[k], 1.0 - out.q);
  const auto r = fwd::energy_gradient(mesh, ScalarField(dual_weight),
                                      field::MatrixField::identity(mesh.cell_count()), out.q,
                                      out.v, 0.0);
  double rn = 0.0;
  for (double x : r) rn += x * x;
  out.dual_residual_norm = std::sqrt(rn);

  // round trip: rotate grad v back and compare with the flux
  const auto gv = geo::gradient(mesh, out.v);
  double err = 0.0, ref = 0.0;
  for (int k = 0; k < mesh.cell_count(); ++k) {
    const Vec2 recovered{gv[k].y, -gv[k].x};  // inverse of rot90
    const Vec2 d = recovered - flux[k];
    err += dot(d, d) * mesh.cell_areas()[k];
    ref += dot(flux[k], flux[k]) * mesh.cell_areas()[k];
  }
  out.roundtrip_flux_error = ref > 0.0 ? std::sqrt(err / ref) : std::sqrt(err);
  return out;
}

PlateauReport plateau_scan(const Mesh& mesh, const std::vector<double>& u, double threshold) {
  if (!(threshold > 0.0)) throw std::invalid_argument("plateau_scan: threshold must be positive");
  const auto g = geo::gradient(mesh, u);
  std::vector<uint8_t> low(mesh.cell_count(), 0);
  for (int k = 0; k < mesh.cell_count(); ++k) low[k] = norm(g[k]) < threshold ? 1 : 0;

  PlateauReport report;
  report.threshold = threshold;
  double lo = u[0], hi = u[0];
  for (double x : u) {
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  report.solution_constant = (hi - lo) <= 1e-12 * (1.0 + std::max(std::abs(hi), std::abs(lo)));

  std::vector<uint8_t> seen(mesh.cell_count(), 0);
  double total_low_area = 0.0;
  for (int start = 0; start < mesh.cell_count(); ++start) {
    if (!low[start] || seen[start]) continue;
    double area = 0.0;
    std::queue<int> frontier;
    frontier.push(start);
    seen[start] = 1;
    while (!frontier.empty()) {
      const int c = frontier.front();
      frontier.pop();
      area += mesh.cell_areas()[c];
      for (int nb : mesh.edge_neighbors(c)) {
        if (nb >= 0 && low[nb] && !seen[nb]) {
          seen[nb] = 1;
          frontier.push(nb);
        }
      }
    }
    ++report.component_count;
    total_low_area += area;
    report.largest_component_fraction =
        std::max(report.largest_component_fraction, area / mesh.total_area());
  }
  report.total_area_fraction = total_low_area / mesh.total_area();
  report.red_flag = !report.solution_constant && report.largest_component_fraction > 0.05;
  return report;
}

double default_plateau_threshold(const Mesh& mesh, const std::vector<double>& u) {
  const auto g = geo::gradient(mesh, u);
  double mx = 0.0;
  for (const auto& v : g) mx = std::max(mx, norm(v));
  // constant solutions have no gradient scale; fall back to a tiny absolute one
  return mx > 0.0 ? 1e-6 * mx : std::numeric_limits<double>::min();
}

int near_zero_cell_count(const std::vector<Complex>& F, double rel_tol) {
  double mx = 0.0;
  for (const auto& f : F) mx = std::max(mx, std::abs(f));
  int count = 0;
  for (const auto& f : F)
    if (std::abs(f) < rel_tol * mx) ++count;
  return count;
}

}  // namespace plap::ucp
