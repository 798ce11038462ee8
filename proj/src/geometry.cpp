#include "geometry.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <string>

namespace plap::geo {

namespace {

std::string cell_str(int k) { return "cell " + std::to_string(k); }

}  // namespace

Mesh Mesh::structured(const Rect& rect, int n) {
  if (n < 1) throw std::invalid_argument("structured mesh: n must be >= 1");
  if (!(rect.width() > 0.0) || !(rect.height() > 0.0))
    throw std::invalid_argument("structured mesh: degenerate rectangle");

  Mesh m;
  const int np = n + 1;
  m.vertices_.reserve(static_cast<size_t>(np) * np);
  for (int j = 0; j < np; ++j) {
    for (int i = 0; i < np; ++i) {
      m.vertices_.push_back({rect.x0 + rect.width() * i / n, rect.y0 + rect.height() * j / n});
    }
  }
  auto vid = [np](int i, int j) { return j * np + i; };
  m.triangles_.reserve(static_cast<size_t>(2) * n * n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int v00 = vid(i, j), v10 = vid(i + 1, j);
      const int v01 = vid(i, j + 1), v11 = vid(i + 1, j + 1);
      // diagonal from lower-left to upper-right
      m.triangles_.push_back({{v00, v10, v11}});
      m.triangles_.push_back({{v00, v11, v01}});
    }
  }
  m.finalize({}, rect.area());
  return m;
}

Mesh Mesh::from_raw(std::vector<Vec2> vertices, std::vector<Triangle> triangles,
                    std::vector<uint8_t> boundary_flags) {
  Mesh m;
  m.vertices_ = std::move(vertices);
  m.triangles_ = std::move(triangles);
  m.finalize(boundary_flags, -1.0);
  return m;
}

void Mesh::finalize(const std::vector<uint8_t>& given_flags, double expected_area) {
  const int nv = vertex_count();
  const int nc = cell_count();
  if (nv < 3 || nc < 1) throw std::invalid_argument("mesh: too few vertices or cells");

  areas_.resize(nc);
  basis_grads_.resize(nc);
  total_area_ = 0.0;
  for (int k = 0; k < nc; ++k) {
    const auto& t = triangles_[k].v;
    for (int i : t) {
      if (i < 0 || i >= nv) throw std::invalid_argument("mesh: vertex index out of range in " + cell_str(k));
    }
    const Vec2 a = vertices_[t[0]], b = vertices_[t[1]], c = vertices_[t[2]];
    const double signed_area = 0.5 * cross(b - a, c - a);
    if (!(signed_area > 0.0))
      throw std::invalid_argument("mesh: nonpositive signed area in " + cell_str(k));
    areas_[k] = signed_area;
    total_area_ += signed_area;
    const double inv = 1.0 / (2.0 * signed_area);
    basis_grads_[k] = {inv * rot90(c - b), inv * rot90(a - c), inv * rot90(b - a)};
  }
  if (expected_area > 0.0 && std::abs(total_area_ - expected_area) > 1e-12 * expected_area)
    throw std::invalid_argument("mesh: cell areas do not sum to the rectangle area");

  // edge incidence: each edge shared by at most two cells
  std::map<std::pair<int, int>, std::array<int, 2>> edges;  // edge -> (cell, local edge)+count
  std::map<std::pair<int, int>, int> edge_count;
  neighbors_.assign(nc, {-1, -1, -1});
  for (int k = 0; k < nc; ++k) {
    const auto& t = triangles_[k].v;
    for (int e = 0; e < 3; ++e) {
      auto key = std::minmax(t[e], t[(e + 1) % 3]);
      int& cnt = edge_count[key];
      if (cnt == 0) {
        edges[key] = {k, e};
      } else if (cnt == 1) {
        const auto other = edges[key];
        neighbors_[k][e] = other[0];
        neighbors_[other[0]][other[1]] = k;
      } else {
        throw std::invalid_argument("mesh: edge shared by more than two cells near " + cell_str(k));
      }
      ++cnt;
    }
  }

  boundary_.assign(nv, 0);
  std::map<int, std::vector<int>> boundary_next;  // boundary edge graph
  for (const auto& [key, cnt] : edge_count) {
    if (cnt == 1) {
      boundary_[key.first] = 1;
      boundary_[key.second] = 1;
      boundary_next[key.first].push_back(key.second);
      boundary_next[key.second].push_back(key.first);
    }
  }
  if (!given_flags.empty()) {
    if (given_flags.size() != static_cast<size_t>(nv))
      throw std::invalid_argument("mesh: boundary flag count mismatch");
    for (int v = 0; v < nv; ++v) {
      if ((given_flags[v] != 0) != (boundary_[v] != 0))
        throw std::invalid_argument("mesh: boundary flag mismatch at vertex " + std::to_string(v));
    }
  }

  vertex_cells_.assign(nv, {});
  lumped_areas_.assign(nv, 0.0);
  for (int k = 0; k < nc; ++k) {
    for (int i : triangles_[k].v) {
      vertex_cells_[i].push_back(k);
      lumped_areas_[i] += areas_[k] / 3.0;
    }
  }

  // walk the boundary cycle (single component expected at desk scale)
  boundary_cycle_.clear();
  boundary_arclength_.clear();
  perimeter_ = 0.0;
  if (!boundary_next.empty()) {
    int start = boundary_next.begin()->first;
    for (const auto& [v, nbrs] : boundary_next) {
      if (nbrs.size() != 2)
        throw std::invalid_argument("mesh: boundary is not a simple cycle at vertex " + std::to_string(v));
      start = std::min(start, v);
    }
    int prev = -1, cur = start;
    do {
      boundary_cycle_.push_back(cur);
      boundary_arclength_.push_back(perimeter_);
      const auto& nbrs = boundary_next[cur];
      const int next = (nbrs[0] == prev) ? nbrs[1] : nbrs[0];
      perimeter_ += norm(vertices_[next] - vertices_[cur]);
      prev = cur;
      cur = next;
    } while (cur != start);
    if (boundary_cycle_.size() != boundary_next.size())
      throw std::invalid_argument("mesh: boundary has more than one component");
  }
}

Vec2 Mesh::centroid(int cell) const {
  const auto& t = triangles_[cell].v;
  const Vec2 s = vertices_[t[0]] + vertices_[t[1]] + vertices_[t[2]];
  return {s.x / 3.0, s.y / 3.0};
}

bool Mesh::cell_touches_boundary(int cell) const {
  for (int i : triangles_[cell].v)
    if (boundary_[i]) return true;
  return false;
}

std::vector<Vec2> gradient(const Mesh& mesh, const std::vector<double>& u) {
  if (u.size() != static_cast<size_t>(mesh.vertex_count()))
    throw std::invalid_argument("gradient: nodal function size does not match vertex count");
  std::vector<Vec2> g(mesh.cell_count());
  for (int k = 0; k < mesh.cell_count(); ++k) {
    const auto& t = mesh.triangles()[k].v;
    const auto& bg = mesh.basis_gradients(k);
    g[k] = u[t[0]] * bg[0] + u[t[1]] * bg[1] + u[t[2]] * bg[2];
  }
  return g;
}

double integrate_cellwise(const Mesh& mesh, const std::vector<double>& c) {
  if (c.size() != static_cast<size_t>(mesh.cell_count()))
    throw std::invalid_argument("integrate_cellwise: one value per cell required");
  double s = 0.0;
  for (int k = 0; k < mesh.cell_count(); ++k) s += c[k] * mesh.cell_areas()[k];
  return s;
}

}  // namespace plap::geo
