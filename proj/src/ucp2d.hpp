#pragma once

#include <complex>
#include <string>
#include <vector>

#include "forward.hpp"

namespace plap::ucp {

using field::ScalarField;
using geo::Mesh;
using geo::Vec2;

using Complex = std::complex<double>;

// Complex gradient f = sigma u_x - i sigma u_y per cell and its nonlinear
// counterpart F_a = |f|^a f (F_a = 0 where f = 0, the continuous extension
// valid for a > -1).
struct ComplexGradientField {
  std::vector<Complex> f;
  std::vector<Complex> Fa;
  double exponent_a = 0.0;
};

ComplexGradientField complex_gradient(const Mesh& mesh, const std::vector<double>& u,
                                      const ScalarField& sigma, double a);

// Magnitudes of the Beltrami coefficients of the first-order system for
// F = F_(p-2)/2:
//   q1 = 1/2 |(p-2)/(p+2) + (p-2)/(3p-2)|,  q2 = 1/2 |(p-2)/(3p-2) - (p-2)/(p+2)|.
// Ellipticity requires q1 + q2 < 1, which holds for every p in (1, inf);
// both vanish at p = 2.
struct BeltramiCoefficients {
  double q1_mag = 0.0;
  double q2_mag = 0.0;
  double p = 2.0;
};

BeltramiCoefficients beltrami_coefficients(double p);

// Residual of dzbar(F) = q1 dz(F) + q2 conj(dz(F)) + H(z,F) over interior
// cells, with derivatives of the cellwise-constant F approximated by
// least-squares plane fits over edge-adjacent cell neighborhoods and the
// sigma derivatives taken from the vertex-sampled field. Normalized by
// ||dz F||_2 + ||F||_2.
struct BeltramiResidualReport {
  double residual = 0.0;
  double dzbar_norm = 0.0;
  double dz_norm = 0.0;
  double f_norm = 0.0;
  int cells_used = 0;
  // |H| <= q3 |F| with q3 from the discrete sigma derivatives
  bool h_bound_ok = true;
  double h_bound_max_violation = 0.0;
  double q3_sup = 0.0;
};

BeltramiResidualReport beltrami_residual(const Mesh& mesh, const std::vector<double>& u,
                                         const std::vector<double>& sigma_vertex, double p);

// promotes a cellwise sigma to vertices by lumped-area averaging (lossy)
std::vector<double> promote_sigma_to_vertices(const Mesh& mesh, const ScalarField& sigma);

// Dual stream function: nodal v with grad v ~ rot90(sigma |grad u|^(p-2) grad u),
// integrated along a spanning tree of the cell adjacency graph, plus the
// energy-gradient norm of v under (sigma^(1-q), q), 1/p + 1/q = 1.
struct StreamFunction {
  std::vector<double> v;
  double q = 2.0;
  double dual_residual_norm = 0.0;     // interior q-energy gradient norm at v
  double roundtrip_flux_error = 0.0;   // relative L2 mismatch of the recovered flux
  double path_residual = 0.0;          // max cross-edge mismatch during integration
};

StreamFunction dual_stream_function(const Mesh& mesh, const std::vector<double>& u,
                                    const ScalarField& sigma, double p);

// Connected components (edge adjacency) of cells with |grad u| below the
// threshold; a component above 5% of the area while the solution is
// non-constant is flagged as a unique-continuation red flag.
struct PlateauReport {
  int component_count = 0;
  double total_area_fraction = 0.0;
  double largest_component_fraction = 0.0;
  bool red_flag = false;
  double threshold = 0.0;
  bool solution_constant = false;
};

PlateauReport plateau_scan(const Mesh& mesh, const std::vector<double>& u, double threshold);

// default plateau threshold: 1e-6 times the maximum cell gradient norm
double default_plateau_threshold(const Mesh& mesh, const std::vector<double>& u);

// count of cells with |F| < rel_tol * max |F| (proxy for zero isolation)
int near_zero_cell_count(const std::vector<Complex>& F, double rel_tol);

}  // namespace plap::ucp
