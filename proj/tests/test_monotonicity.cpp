#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "expr.hpp"
#include "monotonicity.hpp"
#include "rng.hpp"

using namespace plap;
using dn::BoundaryDictionary;
using field::MatrixField;
using field::ScalarField;
using field::SymMat2;
using geo::Mesh;
using geo::Vec2;

namespace {

std::vector<double> nodal(const Mesh& mesh, double (*fn)(Vec2)) {
  std::vector<double> v(mesh.vertex_count());
  for (int i = 0; i < mesh.vertex_count(); ++i) v[i] = fn(mesh.vertices()[i]);
  return v;
}

SymMat2 random_spd(rng::Stream& stream, double lo, double hi) {
  const double theta = stream.uniform(0, 6.283185307179586);
  const double l1 = stream.uniform(lo, hi);
  const double l2 = stream.uniform(lo, hi);
  const double c = std::cos(theta), s = std::sin(theta);
  return {c * c * l1 + s * s * l2, c * s * (l1 - l2), s * s * l1 + c * c * l2};
}

constexpr double kInclusionLow = 0.375;
constexpr double kInclusionHigh = 0.625;

ScalarField inclusion_sigma(const Mesh& mesh) {
  return expr::scalar_field_from_expression(mesh, "1 + chi(0.375,0.625,0.375,0.625)");
}

std::vector<uint8_t> inclusion_cells(const Mesh& mesh) {
  std::vector<uint8_t> d(mesh.cell_count(), 0);
  for (int k = 0; k < mesh.cell_count(); ++k) {
    const auto c = mesh.centroid(k);
    d[k] = (c.x >= kInclusionLow && c.x <= kInclusionHigh && c.y >= kInclusionLow &&
            c.y <= kInclusionHigh)
               ? 1
               : 0;
  }
  return d;
}

}  // namespace

TEST_CASE("equal conductivities give the zero triple") {
  const auto mesh = Mesh::structured({0, 0, 1, 1}, 8);
  const auto sigma = expr::scalar_field_from_expression(mesh, "1 + 0.3*x1");
  const auto A = MatrixField::identity(mesh.cell_count());
  const auto t = mono::monotonicity_triple(mesh, sigma, sigma, A, 2.0,
                                           nodal(mesh, [](Vec2 p) { return p.x; }));
  // the lower-bound integrand carries the factor sigma1^r - sigma2^r, which
  // vanishes identically here, so the outer term is exactly zero
  CHECK(t.lower == 0.0);
  CHECK(t.upper == 0.0);
  CHECK(std::abs(t.middle) <= 1e-10);
}

TEST_CASE("constant-pair closed form") {
  const auto mesh = Mesh::structured({0, 0, 1, 1}, 8);
  const auto A = MatrixField::identity(mesh.cell_count());
  const auto fx = nodal(mesh, [](Vec2 p) { return p.x; });

  // (sigma1, sigma2) = (2, 1), p = 2: (1/2, 1, 1)
  {
    const auto t = mono::monotonicity_triple(mesh, ScalarField::constant(mesh.cell_count(), 2.0),
                                             ScalarField::constant(mesh.cell_count(), 1.0), A, 2.0,
                                             fx);
    CHECK(t.lower == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(t.middle == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(t.upper == doctest::Approx(1.0).epsilon(1e-10));
  }

  for (double c : {1.5, 2.0, 4.0}) {
    for (double p : {1.5, 2.0, 3.0}) {
      const auto t = mono::monotonicity_triple(mesh, ScalarField::constant(mesh.cell_count(), c),
                                               ScalarField::constant(mesh.cell_count(), 1.0), A, p,
                                               fx);
      const double lower = (p - 1.0) * (1.0 - std::pow(c, -1.0 / (p - 1.0)));
      CHECK(std::abs(t.lower - lower) <= 1e-6);
      CHECK(std::abs(t.middle - (c - 1.0)) <= 1e-6);
      CHECK(std::abs(t.upper - (c - 1.0)) <= 1e-6);
    }
  }
}

TEST_CASE("the closed-form lower bound never exceeds the upper") {
  for (double p : {1.5, 2.0, 3.0, 5.0}) {
    for (double c = 1.25; c <= 10.0; c += 0.25) {
      const double lower = (p - 1.0) * (1.0 - std::pow(c, -1.0 / (p - 1.0)));
      CHECK(lower <= c - 1.0 + 1e-12);
    }
  }
}

TEST_CASE("sandwich holds on randomized ordered instances") {
  rng::Stream stream(101, "mono-sandwich-unit");
  const auto mesh = Mesh::structured({0, 0, 1, 1}, 8);
  const double ps[] = {1.5, 2.0, 3.0};

  for (int trial = 0; trial < 30; ++trial) {
    std::vector<double> s1(mesh.cell_count()), s2(mesh.cell_count());
    for (int k = 0; k < mesh.cell_count(); ++k) {
      const double a = stream.uniform(1.0, 3.0);
      const double b = stream.uniform(1.0, 3.0);
      s1[k] = std::max(a, b);
      s2[k] = std::min(a, b);
    }
    const MatrixField A(std::vector<SymMat2>(mesh.cell_count(), random_spd(stream, 0.5, 2.0)));
    const double p = ps[stream.index(3)];

    std::vector<double> f(mesh.vertex_count());
    const double ax = stream.uniform(-1, 1), ay = stream.uniform(-1, 1);
    const auto bump = dn::boundary_bump(mesh, stream.uniform(0, 4), 0.75);
    for (int i = 0; i < mesh.vertex_count(); ++i)
      f[i] = ax * mesh.vertices()[i].x + ay * mesh.vertices()[i].y + bump[i];

    const auto t =
        mono::monotonicity_triple(mesh, ScalarField(s1), ScalarField(s2), A, p, f);
    const double tol = 1e-6 * (1.0 + std::abs(t.upper));
    CHECK(t.lower <= t.middle + tol);
    CHECK(t.middle <= t.upper + tol);
    CHECK(t.lower >= -tol);

    // reversed ordering flips all signs
    const auto ts =
        mono::monotonicity_triple(mesh, ScalarField(s2), ScalarField(s1), A, p, f);
    CHECK(ts.lower <= tol);
    CHECK(ts.middle <= tol);
    CHECK(ts.upper <= tol);
  }
}

TEST_CASE("beta optimality of the proof constant") {
  {
    const auto table = mono::beta_optimality_check(2.0, {0.5, 1.0, 2.0});
    CHECK(table.beta_at_min() == 1.0);
  }
  {
    std::vector<double> grid;
    for (double b = 1.8; b <= 2.2 + 1e-12; b += 0.01) grid.push_back(b);
    const auto table = mono::beta_optimality_check(3.0, grid);
    CHECK(table.beta_at_min() == doctest::Approx(2.0).epsilon(1e-9));
  }
  for (double p : {1.5, 2.0, 3.0, 5.0}) {
    const double pprime = p / (p - 1.0);
    auto h = [pprime](double b) { return std::pow(1.0 + b, pprime) / b; };
    CHECK(h(1e-3) > h(p - 1.0));
    CHECK(h(1e3) > h(p - 1.0));
  }
  CHECK_THROWS_AS(mono::beta_optimality_check(2.0, {0.5, -1.0}), std::invalid_argument);
  CHECK_THROWS_AS(mono::beta_optimality_check(0.9, {0.5}), std::invalid_argument);
}

TEST_CASE("beta map is unimodal on a monotone grid") {
  const double p = 3.0;
  std::vector<double> grid;
  for (double b = 0.2; b <= 4.0 + 1e-12; b += 0.2) grid.push_back(b);
  const auto table = mono::beta_optimality_check(p, grid);
  for (int i = 1; i <= table.argmin; ++i) CHECK(table.values[i] < table.values[i - 1]);
  for (size_t i = table.argmin + 1; i < table.values.size(); ++i)
    CHECK(table.values[i] > table.values[i - 1]);
}

TEST_CASE("uniqueness experiment certifies a gap for an inclusion") {
  const auto mesh = Mesh::structured({0, 0, 1, 1}, 8);
  const auto sigma1 = inclusion_sigma(mesh);
  const auto sigma2 = ScalarField::constant(mesh.cell_count(), 1.0);
  const auto A = MatrixField::identity(mesh.cell_count());

  BoundaryDictionary dict;
  dict.entries.push_back({"x1", nodal(mesh, [](Vec2 p) { return p.x; })});

  for (double p : {2.0, 3.0}) {
    const auto report = mono::uniqueness_experiment(mesh, sigma1, sigma2, A, p, dict);
    CHECK(report.distinguishable);
    CHECK(report.difference_cell_count > 0);
    // with u2 = x1 exact, the certified bound on D is
    // (p-1)(1 - 2^(-1/(p-1))) * area(D)
    const double expected = (p - 1.0) * (1.0 - std::pow(2.0, -1.0 / (p - 1.0))) * 0.0625;
    CHECK(report.entries[0].lower_bound_on_difference_set ==
          doctest::Approx(expected).epsilon(1e-6));
    CHECK(report.max_middle >= report.entries[0].lower_bound_on_difference_set * (1.0 - 1e-6));
  }
}

TEST_CASE("uniqueness experiment: equal fields are indistinguishable") {
  const auto mesh = Mesh::structured({0, 0, 1, 1}, 8);
  const auto sigma = ScalarField::constant(mesh.cell_count(), 1.0);
  const auto A = MatrixField::identity(mesh.cell_count());
  BoundaryDictionary dict;
  dict.entries.push_back({"x1", nodal(mesh, [](Vec2 p) { return p.x; })});
  const auto report = mono::uniqueness_experiment(mesh, sigma, sigma, A, 2.0, dict);
  CHECK(!report.distinguishable);
  CHECK(std::abs(report.max_middle) <= report.gap_tolerance);
}

TEST_CASE("uniqueness experiment rejects violated ordering") {
  const auto mesh = Mesh::structured({0, 0, 1, 1}, 4);
  const auto lo = ScalarField::constant(mesh.cell_count(), 1.0);
  const auto hi = ScalarField::constant(mesh.cell_count(), 2.0);
  const auto A = MatrixField::identity(mesh.cell_count());
  BoundaryDictionary dict;
  dict.entries.push_back({"x1", nodal(mesh, [](Vec2 p) { return p.x; })});
  CHECK_THROWS_AS(mono::uniqueness_experiment(mesh, lo, hi, A, 2.0, dict),
                  std::invalid_argument);
}

TEST_CASE("detector: control with equal conductivities detects nothing") {
  const auto mesh = Mesh::structured({0, 0, 1, 1}, 8);
  const auto sigma2 = ScalarField::constant(mesh.cell_count(), 1.0);
  const auto A = MatrixField::identity(mesh.cell_count());
  const auto dict = dn::default_dictionary(mesh, 8, 1.0, false);

  const auto oracle_table = dn::dn_table(mesh, sigma2, A, 2.0, dict);
  std::map<std::string, double> oracle;
  for (size_t i = 0; i < oracle_table.labels.size(); ++i)
    oracle[oracle_table.labels[i]] = oracle_table.values[i][i];

  const auto est = mono::detect_difference_region(mesh, oracle, sigma2, A, 2.0, dict);
  for (auto d : est.detected) CHECK(d == 0);
  for (double s : est.cell_scores) CHECK(s == 0.0);
}

TEST_CASE("detector localizes a centered inclusion") {
  const auto mesh = Mesh::structured({0, 0, 1, 1}, 16);
  const auto sigma1 = inclusion_sigma(mesh);
  const auto sigma2 = ScalarField::constant(mesh.cell_count(), 1.0);
  const auto A = MatrixField::identity(mesh.cell_count());
  const auto dict = dn::default_dictionary(mesh, 16, 1.0, false);

  const auto oracle_table = dn::dn_table(mesh, sigma1, A, 2.0, dict);
  REQUIRE(oracle_table.ok());
  std::map<std::string, double> oracle;
  for (size_t i = 0; i < oracle_table.labels.size(); ++i)
    oracle[oracle_table.labels[i]] = oracle_table.values[i][i];

  const auto est = mono::detect_difference_region(mesh, oracle, sigma2, A, 2.0, dict);
  CHECK(mono::jaccard(est.detected, inclusion_cells(mesh)) >= 0.5);
}

TEST_CASE("detector with the single probe x1 keeps inclusion cells in the top half") {
  const auto mesh = Mesh::structured({0, 0, 1, 1}, 16);
  const auto sigma1 = inclusion_sigma(mesh);
  const auto sigma2 = ScalarField::constant(mesh.cell_count(), 1.0);
  const auto A = MatrixField::identity(mesh.cell_count());
  BoundaryDictionary dict;
  dict.entries.push_back({"x1", nodal(mesh, [](Vec2 p) { return p.x; })});

  const auto oracle_table = dn::dn_table(mesh, sigma1, A, 2.0, dict);
  std::map<std::string, double> oracle{{"x1", oracle_table.values[0][0]}};
  const auto est = mono::detect_difference_region(mesh, oracle, sigma2, A, 2.0, dict);

  // u2 = x1 spreads energy uniformly: every cell carries the same score, so
  // inclusion cells sit (weakly) above the median
  std::vector<double> sorted = est.cell_scores;
  std::sort(sorted.begin(), sorted.end());
  const double median = sorted[sorted.size() / 2];
  const auto inside = inclusion_cells(mesh);
  for (int k = 0; k < mesh.cell_count(); ++k)
    if (inside[k]) CHECK(est.cell_scores[k] >= median - 1e-15);
}

TEST_CASE("detector validates oracle labels") {
  const auto mesh = Mesh::structured({0, 0, 1, 1}, 4);
  const auto sigma2 = ScalarField::constant(mesh.cell_count(), 1.0);
  const auto A = MatrixField::identity(mesh.cell_count());
  BoundaryDictionary dict;
  dict.entries.push_back({"x1", nodal(mesh, [](Vec2 p) { return p.x; })});
  std::map<std::string, double> oracle{{"other", 1.0}};
  CHECK_THROWS_AS(mono::detect_difference_region(mesh, oracle, sigma2, A, 2.0, dict),
                  std::invalid_argument);
}
