#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "geometry.hpp"
#include "rng.hpp"

using namespace plap;
using geo::Mesh;
using geo::Rect;
using geo::Vec2;

namespace {

std::vector<double> sample(const Mesh& mesh, double (*fn)(Vec2)) {
  std::vector<double> v(mesh.vertex_count());
  for (int i = 0; i < mesh.vertex_count(); ++i) v[i] = fn(mesh.vertices()[i]);
  return v;
}

}  // namespace

TEST_CASE("structured mesh on the unit square, n = 1") {
  const auto mesh = Mesh::structured({0, 0, 1, 1}, 1);
  CHECK(mesh.cell_count() == 2);
  CHECK(mesh.vertex_count() == 4);
  CHECK(mesh.cell_areas()[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(mesh.cell_areas()[1] == doctest::Approx(0.5).epsilon(1e-15));
  for (int v = 0; v < 4; ++v) CHECK(mesh.is_boundary_vertex(v));
}

TEST_CASE("structured mesh counts and areas") {
  const auto unit = Mesh::structured({0, 0, 1, 1}, 4);
  CHECK(unit.cell_count() == 32);
  CHECK(unit.total_area() == doctest::Approx(1.0).epsilon(1e-14));

  const auto wide = Mesh::structured({0, 0, 2, 1}, 2);
  CHECK(wide.cell_count() == 8);
  CHECK(wide.total_area() == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("structured mesh rejects bad input") {
  CHECK_THROWS_AS(Mesh::structured({0, 0, 1, 1}, 0), std::invalid_argument);
  CHECK_THROWS_AS(Mesh::structured({0, 0, 0, 1}, 4), std::invalid_argument);
  CHECK_THROWS_AS(Mesh::structured({0, 0, 1, 0}, 4), std::invalid_argument);
}

TEST_CASE("cell areas sum to the rectangle area up to 1e-12 for n <= 256") {
  for (int n : {1, 2, 3, 5, 8, 16, 64, 256}) {
    const auto mesh = Mesh::structured({0.25, -1.5, 2.75, 0.5}, n);
    std::vector<double> ones(mesh.cell_count(), 1.0);
    CHECK(std::abs(geo::integrate_cellwise(mesh, ones) - 5.0) <= 1e-12 * 5.0);
  }
}

TEST_CASE("gradient reproduces affine functions exactly") {
  const auto mesh = Mesh::structured({0, 0, 1, 1}, 5);

  const auto gx = geo::gradient(mesh, sample(mesh, [](Vec2 p) { return p.x; }));
  for (const auto& g : gx) {
    CHECK(g.x == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::abs(g.y) <= 1e-14);
  }

  const auto gc = geo::gradient(mesh, sample(mesh, [](Vec2) { return 3.0; }));
  for (const auto& g : gc) {
    CHECK(std::abs(g.x) <= 1e-14);
    CHECK(std::abs(g.y) <= 1e-14);
  }

  const auto ga = geo::gradient(mesh, sample(mesh, [](Vec2 p) { return 2 * p.x + 5 * p.y; }));
  for (const auto& g : ga) {
    CHECK(g.x == doctest::Approx(2.0).epsilon(1e-13));
    CHECK(g.y == doctest::Approx(5.0).epsilon(1e-13));
  }
}

TEST_CASE("gradient is linear in the nodal function") {
  const auto mesh = Mesh::structured({0, 0, 1, 1}, 4);
  rng::Stream stream(7, "geometry-linearity");
  std::vector<double> u(mesh.vertex_count()), v(mesh.vertex_count());
  for (auto& x : u) x = stream.uniform(-1, 1);
  for (auto& x : v) x = stream.uniform(-1, 1);
  const double t = 0.37;

  std::vector<double> w(mesh.vertex_count());
  for (int i = 0; i < mesh.vertex_count(); ++i) w[i] = u[i] + t * v[i];

  const auto gu = geo::gradient(mesh, u);
  const auto gv = geo::gradient(mesh, v);
  const auto gw = geo::gradient(mesh, w);
  for (int k = 0; k < mesh.cell_count(); ++k) {
    CHECK(gw[k].x == doctest::Approx(gu[k].x + t * gv[k].x).epsilon(1e-12));
    CHECK(gw[k].y == doctest::Approx(gu[k].y + t * gv[k].y).epsilon(1e-12));
  }
}

TEST_CASE("integrate_cellwise basics") {
  const auto mesh = Mesh::structured({0, 0, 1, 1}, 4);
  CHECK(geo::integrate_cellwise(mesh, std::vector<double>(mesh.cell_count(), 1.0)) ==
        doctest::Approx(1.0).epsilon(1e-14));
  CHECK(geo::integrate_cellwise(mesh, std::vector<double>(mesh.cell_count(), 0.0)) == 0.0);
  CHECK_THROWS_AS(geo::integrate_cellwise(mesh, std::vector<double>(3, 1.0)),
                  std::invalid_argument);
}

TEST_CASE("indicator of the left half integrates to one half on even meshes") {
  for (int n : {4, 8, 16}) {
    const auto mesh = Mesh::structured({0, 0, 1, 1}, n);
    std::vector<double> c(mesh.cell_count());
    // independent check value: direct summation over triangles
    double direct = 0.0;
    for (int k = 0; k < mesh.cell_count(); ++k) {
      const auto& t = mesh.triangles()[k].v;
      const Vec2 a = mesh.vertices()[t[0]], b = mesh.vertices()[t[1]], d = mesh.vertices()[t[2]];
      const double cx = (a.x + b.x + d.x) / 3.0;
      c[k] = cx < 0.5 ? 1.0 : 0.0;
      if (cx < 0.5) direct += 0.5 * geo::cross(b - a, d - a);
    }
    CHECK(std::abs(direct - 0.5) <= 1e-12);
    CHECK(geo::integrate_cellwise(mesh, c) == doctest::Approx(0.5).epsilon(1e-12));
  }
}

TEST_CASE("boundary structure of the structured mesh") {
  const int n = 6;
  const auto mesh = Mesh::structured({0, 0, 1, 1}, n);

  int flagged = 0;
  for (int v = 0; v < mesh.vertex_count(); ++v) {
    const auto p = mesh.vertices()[v];
    const bool on_edge = p.x == 0.0 || p.x == 1.0 || p.y == 0.0 || p.y == 1.0;
    CHECK(mesh.is_boundary_vertex(v) == on_edge);
    flagged += mesh.is_boundary_vertex(v) ? 1 : 0;
  }
  CHECK(flagged == 4 * n);

  CHECK(static_cast<int>(mesh.boundary_cycle().size()) == 4 * n);
  CHECK(mesh.boundary_perimeter() == doctest::Approx(4.0).epsilon(1e-14));

  int boundary_edges = 0;
  for (int k = 0; k < mesh.cell_count(); ++k)
    for (int nb : mesh.edge_neighbors(k))
      if (nb < 0) ++boundary_edges;
  CHECK(boundary_edges == 4 * n);
}

TEST_CASE("lumped vertex areas sum to the domain area") {
  const auto mesh = Mesh::structured({0, 0, 1, 1}, 5);
  double total = 0.0;
  for (double w : mesh.lumped_vertex_areas()) total += w;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("from_raw validates orientation and edge sharing") {
  // clockwise triangle: negative signed area
  CHECK_THROWS_AS(Mesh::from_raw({{0, 0}, {1, 0}, {0, 1}}, {{{0, 2, 1}}}), std::invalid_argument);

  // the edge (0,1) is used by three triangles
  CHECK_THROWS_AS(Mesh::from_raw({{0, 0}, {1, 0}, {0, 1}, {1, 1}, {0.5, -1}},
                                 {{{0, 1, 2}}, {{0, 1, 3}}, {{0, 4, 1}}}),
                  std::invalid_argument);

  // mismatched boundary flags are rejected
  CHECK_THROWS_AS(Mesh::from_raw({{0, 0}, {1, 0}, {0, 1}}, {{{0, 1, 2}}}, {1, 1, 0}),
                  std::invalid_argument);
}

TEST_CASE("gradient rejects mismatched sizes") {
  const auto mesh = Mesh::structured({0, 0, 1, 1}, 2);
  CHECK_THROWS_AS(geo::gradient(mesh, std::vector<double>(5, 0.0)), std::invalid_argument);
}
