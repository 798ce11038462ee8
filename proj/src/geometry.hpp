#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

namespace plap::geo {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double t, Vec2 a) { return {t * a.x, t * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::sqrt(a.x * a.x + a.y * a.y); }
// 90-degree counterclockwise rotation
inline Vec2 rot90(Vec2 a) { return {-a.y, a.x}; }

struct Rect {
  double x0 = 0.0, y0 = 0.0, x1 = 1.0, y1 = 1.0;
  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  double area() const { return width() * height(); }
};

struct Triangle {
  std::array<int, 3> v;  // counterclockwise vertex indices
};

// Conforming triangulation of a planar polygonal domain. Immutable after
// construction; all derived quantities (areas, adjacency, boundary data)
// are computed once up front.
class Mesh {
 public:
  // 2n^2 triangles on an axis-aligned rectangle; each grid square is split
  // along its lower-left to upper-right diagonal.
  static Mesh structured(const Rect& rect, int n);

  // Builds from raw vertex/triangle lists, validating all mesh invariants.
  // If boundary_flags is nonempty it is cross-checked against the flags
  // derived from edge incidence.
  static Mesh from_raw(std::vector<Vec2> vertices, std::vector<Triangle> triangles,
                       std::vector<uint8_t> boundary_flags = {});

  int vertex_count() const { return static_cast<int>(vertices_.size()); }
  int cell_count() const { return static_cast<int>(triangles_.size()); }

  const std::vector<Vec2>& vertices() const { return vertices_; }
  const std::vector<Triangle>& triangles() const { return triangles_; }
  const std::vector<double>& cell_areas() const { return areas_; }
  const std::vector<uint8_t>& boundary_vertex_flags() const { return boundary_; }

  bool is_boundary_vertex(int v) const { return boundary_[v] != 0; }
  double total_area() const { return total_area_; }
  Vec2 centroid(int cell) const;

  // Gradients of the three nodal hat functions on a cell, ordered like the
  // cell's vertex triple.
  const std::array<Vec2, 3>& basis_gradients(int cell) const { return basis_grads_[cell]; }

  // Edge-adjacent neighbor cells (-1 where the edge is on the boundary);
  // entry e faces the edge (v[e], v[(e+1)%3]).
  const std::array<int, 3>& edge_neighbors(int cell) const { return neighbors_[cell]; }

  // Cell touches the boundary through any of its vertices.
  bool cell_touches_boundary(int cell) const;

  const std::vector<int>& cells_around_vertex(int v) const { return vertex_cells_[v]; }

  // Lumped vertex weights: one third of the area of each incident cell.
  const std::vector<double>& lumped_vertex_areas() const { return lumped_areas_; }

  // Boundary vertices ordered along the (single) boundary cycle, together
  // with the cumulative arclength of each vertex from the start of the walk.
  const std::vector<int>& boundary_cycle() const { return boundary_cycle_; }
  const std::vector<double>& boundary_arclength() const { return boundary_arclength_; }
  double boundary_perimeter() const { return perimeter_; }

 private:
  void finalize(const std::vector<uint8_t>& given_flags, double expected_area);

  std::vector<Vec2> vertices_;
  std::vector<Triangle> triangles_;
  std::vector<double> areas_;
  std::vector<uint8_t> boundary_;
  std::vector<std::array<Vec2, 3>> basis_grads_;
  std::vector<std::array<int, 3>> neighbors_;
  std::vector<std::vector<int>> vertex_cells_;
  std::vector<double> lumped_areas_;
  std::vector<int> boundary_cycle_;
  std::vector<double> boundary_arclength_;
  double total_area_ = 0.0;
  double perimeter_ = 0.0;
};

// Per-triangle constant gradient of the piecewise-linear interpolant of u.
std::vector<Vec2> gradient(const Mesh& mesh, const std::vector<double>& u);

// Sum of c_T * area_T over cells.
double integrate_cellwise(const Mesh& mesh, const std::vector<double>& c);

}  // namespace plap::geo
