#include "fields.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace plap::field {

double SymMat2::eig_min() const {
  const double h = 0.5 * (a11 + a22);
  const double r = std::sqrt(0.25 * (a11 - a22) * (a11 - a22) + a12 * a12);
  return h - r;
}

double SymMat2::eig_max() const {
  const double h = 0.5 * (a11 + a22);
  const double r = std::sqrt(0.25 * (a11 - a22) * (a11 - a22) + a12 * a12);
  return h + r;
}

double Mat2::max_abs() const {
  return std::max(std::max(std::abs(m11), std::abs(m12)), std::max(std::abs(m21), std::abs(m22)));
}

ScalarField::ScalarField(std::vector<double> cell_values, double lower_bound)
    : values_(std::move(cell_values)), lower_bound_(lower_bound) {
  if (!(lower_bound_ > 0.0)) throw std::invalid_argument("scalar field: lower bound must be positive");
  for (size_t k = 0; k < values_.size(); ++k) {
    if (!(values_[k] >= lower_bound_))
      throw std::invalid_argument("scalar field: value below lower bound at cell " + std::to_string(k));
  }
}

ScalarField::ScalarField(std::vector<double> cell_values)
    : values_(std::move(cell_values)), lower_bound_(0.0) {
  if (values_.empty()) throw std::invalid_argument("scalar field: empty");
  lower_bound_ = *std::min_element(values_.begin(), values_.end());
  if (!(lower_bound_ > 0.0)) throw std::invalid_argument("scalar field: values must be positive");
}

ScalarField ScalarField::constant(int cells, double value) {
  return ScalarField(std::vector<double>(cells, value), value);
}

MatrixField::MatrixField(std::vector<SymMat2> cell_matrices, double ellipticity_bound)
    : matrices_(std::move(cell_matrices)), bound_(ellipticity_bound) {
  if (!(bound_ > 0.0)) throw std::invalid_argument("matrix field: ellipticity bound must be positive");
  for (size_t k = 0; k < matrices_.size(); ++k) {
    if (!(matrices_[k].eig_min() >= bound_ * (1.0 - 1e-12)))
      throw std::invalid_argument("matrix field: ellipticity violated at cell " + std::to_string(k));
  }
}

MatrixField::MatrixField(std::vector<SymMat2> cell_matrices)
    : matrices_(std::move(cell_matrices)), bound_(0.0) {
  if (matrices_.empty()) throw std::invalid_argument("matrix field: empty");
  bound_ = matrices_[0].eig_min();
  for (size_t k = 0; k < matrices_.size(); ++k) {
    const double ev = matrices_[k].eig_min();
    if (!(ev > 0.0))
      throw std::invalid_argument("matrix field: not positive definite at cell " + std::to_string(k));
    bound_ = std::min(bound_, ev);
  }
}

MatrixField MatrixField::identity(int cells) {
  return MatrixField(std::vector<SymMat2>(cells, SymMat2::identity()), 1.0);
}

Mat2 spd_factorize_cell(const SymMat2& a, int cell_for_error) {
  const auto fail = [cell_for_error](const char* what) {
    std::string msg = what;
    if (cell_for_error >= 0) msg += " at cell " + std::to_string(cell_for_error);
    throw std::invalid_argument(msg);
  };
  if (!(a.a11 > 0.0) || !(a.det() > 0.0)) fail("spd_factorize: cell matrix is not positive definite");

  // Gram-Schmidt on (e1, e2) in the A inner product: v1 = e1/|e1|_A,
  // w2 = e2 - <e2,v1>_A v1, v2 = w2/|w2|_A. Then V = (v1 v2) satisfies
  // V^T A V = I and B = V^{-1}.
  const double n1 = std::sqrt(a.quad({1.0, 0.0}));
  const Vec2 v1{1.0 / n1, 0.0};
  const Vec2 e2{0.0, 1.0};
  const double proj = dot(a.apply(e2), v1);
  const Vec2 w2 = e2 - proj * v1;
  const double n2sq = a.quad(w2);
  if (!(n2sq > 0.0)) fail("spd_factorize: Gram-Schmidt broke down");
  const double n2 = std::sqrt(n2sq);
  const Vec2 v2{w2.x / n2, w2.y / n2};

  // invert V = [[v1.x, v2.x], [v1.y, v2.y]]
  const double det = v1.x * v2.y - v2.x * v1.y;
  if (det == 0.0) fail("spd_factorize: singular orthonormal frame");
  const double inv = 1.0 / det;
  return {inv * v2.y, -inv * v2.x, -inv * v1.y, inv * v1.x};
}

std::vector<Mat2> spd_factorize(const MatrixField& A) {
  std::vector<Mat2> out(A.size());
  for (int k = 0; k < A.size(); ++k) out[k] = spd_factorize_cell(A[k], k);
  return out;
}

HolderReport holder_report(const std::vector<double>& values, const std::vector<Vec2>& points,
                           double alpha) {
  if (!(alpha > 0.0) || !(alpha < 1.0)) throw std::invalid_argument("holder_report: alpha must lie in (0,1)");
  if (values.size() != points.size()) throw std::invalid_argument("holder_report: size mismatch");
  HolderReport r;
  r.alpha = alpha;
  for (double v : values) r.sup_norm = std::max(r.sup_norm, std::abs(v));
  const size_t n = values.size();
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i + 1; j < n; ++j) {
      const double d = norm(points[i] - points[j]);
      if (d == 0.0) continue;
      r.seminorm = std::max(r.seminorm, std::abs(values[i] - values[j]) / std::pow(d, alpha));
    }
  }
  return r;
}

HolderReport holder_report(const ScalarField& f, const geo::Mesh& mesh, double alpha) {
  if (f.size() != mesh.cell_count()) throw std::invalid_argument("holder_report: field/mesh mismatch");
  std::vector<Vec2> pts(mesh.cell_count());
  for (int k = 0; k < mesh.cell_count(); ++k) pts[k] = mesh.centroid(k);
  return holder_report(f.values(), pts, alpha);
}

HolderReport holder_report(const std::vector<double>& nodal, const geo::Mesh& mesh, double alpha) {
  if (nodal.size() != static_cast<size_t>(mesh.vertex_count()))
    throw std::invalid_argument("holder_report: nodal/mesh mismatch");
  return holder_report(nodal, mesh.vertices(), alpha);
}

}  // namespace plap::field
