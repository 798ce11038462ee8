#pragma once

#include <vector>

#include "geometry.hpp"

namespace plap::field {

using geo::Vec2;

// symmetric 2x2 matrix stored as (a11, a12, a22)
struct SymMat2 {
  double a11 = 1.0, a12 = 0.0, a22 = 1.0;

  Vec2 apply(Vec2 v) const { return {a11 * v.x + a12 * v.y, a12 * v.x + a22 * v.y}; }
  double quad(Vec2 v) const { return dot(apply(v), v); }  // v . A v
  double trace() const { return a11 + a22; }
  double det() const { return a11 * a22 - a12 * a12; }
  double eig_min() const;
  double eig_max() const;
  static SymMat2 identity() { return {1.0, 0.0, 1.0}; }
};

inline SymMat2 operator+(SymMat2 a, SymMat2 b) { return {a.a11 + b.a11, a.a12 + b.a12, a.a22 + b.a22}; }
inline SymMat2 operator-(SymMat2 a, SymMat2 b) { return {a.a11 - b.a11, a.a12 - b.a12, a.a22 - b.a22}; }
inline SymMat2 operator*(double t, SymMat2 a) { return {t * a.a11, t * a.a12, t * a.a22}; }

// general 2x2 matrix, row major
struct Mat2 {
  double m11 = 0.0, m12 = 0.0, m21 = 0.0, m22 = 0.0;
  double max_abs() const;
};

// Positive scalar coefficient: every value >= lower_bound > 0.
class ScalarField {
 public:
  ScalarField(std::vector<double> cell_values, double lower_bound);
  // derives the bound as the minimum cell value
  explicit ScalarField(std::vector<double> cell_values);
  static ScalarField constant(int cells, double value);

  const std::vector<double>& values() const { return values_; }
  double lower_bound() const { return lower_bound_; }
  double operator[](int cell) const { return values_[cell]; }
  int size() const { return static_cast<int>(values_.size()); }

 private:
  std::vector<double> values_;
  double lower_bound_;
};

// Symmetric positive definite matrix coefficient: every cell matrix has
// smallest eigenvalue >= ellipticity_bound > 0.
class MatrixField {
 public:
  MatrixField(std::vector<SymMat2> cell_matrices, double ellipticity_bound);
  explicit MatrixField(std::vector<SymMat2> cell_matrices);
  static MatrixField identity(int cells);

  const std::vector<SymMat2>& matrices() const { return matrices_; }
  double ellipticity_bound() const { return bound_; }
  const SymMat2& operator[](int cell) const { return matrices_[cell]; }
  int size() const { return static_cast<int>(matrices_.size()); }

 private:
  std::vector<SymMat2> matrices_;
  double bound_;
};

struct HolderReport {
  double sup_norm = 0.0;
  double seminorm = 0.0;
  double alpha = 0.0;
  double c_norm() const { return sup_norm + seminorm; }
};

// Pointwise B with B^T B = A, built by Gram-Schmidt orthonormalization of
// the standard basis in the A(x) inner product (V with V^T A V = I, then
// B = V^{-1}). The construction is deterministic and varies continuously
// with A; the resulting B is upper triangular for the e1-first order.
std::vector<Mat2> spd_factorize(const MatrixField& A);
Mat2 spd_factorize_cell(const SymMat2& a, int cell_for_error = -1);

// Discrete sup norm and alpha-Holder seminorm of point samples: the
// seminorm is the maximum of |f(x)-f(y)| / |x-y|^alpha over sample pairs.
HolderReport holder_report(const std::vector<double>& values, const std::vector<Vec2>& points,
                           double alpha);
// samples a cellwise field at centroids
HolderReport holder_report(const ScalarField& f, const geo::Mesh& mesh, double alpha);
// samples a nodal function at vertices
HolderReport holder_report(const std::vector<double>& nodal, const geo::Mesh& mesh, double alpha);

}  // namespace plap::field
