#include "doctest.h"
#include "spc/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

using namespace spc;

namespace {

double area_sum(const Mesh& m) {
  double s = 0.0;
  for (std::size_t t = 0; t < m.num_triangles(); ++t) s += m.area(static_cast<int>(t));
  return s;
}

}  // namespace

TEST_CASE("initial meshes") {
  const Mesh sq = make_initial_mesh(Domain::UnitSquare);
  CHECK(sq.num_vertices() == 9);
  CHECK(sq.num_triangles() == 8);
  CHECK(sq.num_interior_vertices() == 1);
  CHECK(check_mesh(sq).ok());
  CHECK(area_sum(sq) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(sq.min_angle() == doctest::Approx(M_PI / 4));

  const Mesh l = make_initial_mesh(Domain::LShape);
  CHECK(l.num_triangles() == 24);
  CHECK(l.num_vertices() == 21);
  CHECK(l.num_interior_vertices() == 5);
  CHECK(check_mesh(l).ok());
  CHECK(area_sum(l) == doctest::Approx(3.0).epsilon(1e-15));
  for (std::size_t t = 0; t < l.num_triangles(); ++t) {
    const auto c = l.corners(static_cast<int>(t));
    const Point g = (1.0 / 3.0) * (c[0] + c[1] + c[2]);
    CHECK_FALSE((g.x > 0.0 && g.y < 0.0));
  }
  CHECK(l.is_boundary_vertex(0) == on_domain_boundary(Domain::LShape, l.vertex(0)));
}

TEST_CASE("bisecting one triangle keeps the mesh conforming") {
  const Mesh m0 = make_initial_mesh(Domain::UnitSquare);
  const std::vector<int> marked{0};
  const Mesh m1 = refine_bisection(m0, marked);
  CHECK(check_mesh(m1).ok());
  CHECK(m1.num_triangles() > m0.num_triangles());
  CHECK(m1.generation() == 1);
  CHECK(area_sum(m1) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("empty marking returns the mesh unchanged") {
  const Mesh m0 = make_initial_mesh(Domain::LShape);
  const Mesh m1 = refine_bisection(m0, {});
  CHECK(m1.num_triangles() == m0.num_triangles());
  CHECK(m1.num_vertices() == m0.num_vertices());
}

TEST_CASE("out of range marks throw") {
  const Mesh m0 = make_initial_mesh(Domain::UnitSquare);
  const std::vector<int> bad{8};
  CHECK_THROWS_AS(refine_bisection(m0, bad), std::out_of_range);
  const std::vector<int> neg{-1};
  CHECK_THROWS_AS(refine_bisection(m0, neg), std::out_of_range);
}

TEST_CASE("uniform refinement halves h every two sweeps") {
  Mesh m = make_initial_mesh(Domain::UnitSquare);
  const double h0 = m.max_diameter();
  m = refine_uniform(refine_uniform(m));
  CHECK(m.max_diameter() == doctest::Approx(0.5 * h0));
  CHECK(m.num_triangles() == 32);
  CHECK(check_mesh(m).ok());
}

TEST_CASE("random adaptive refinement: conformity, area, angles, nesting") {
  std::mt19937 rng(7);
  for (Domain d : {Domain::UnitSquare, Domain::LShape}) {
    Mesh m = make_initial_mesh(d);
    const double angle0 = m.min_angle();
    for (int step = 0; step < 12; ++step) {
      std::vector<int> marked;
      std::uniform_int_distribution<int> pick(0, static_cast<int>(m.num_triangles()) - 1);
      for (int k = 0; k < 1 + static_cast<int>(m.num_triangles()) / 10; ++k)
        marked.push_back(pick(rng));
      const Mesh next = refine_bisection(m, marked);
      CHECK(check_mesh(next).ok());
      CHECK(area_sum(next) == doctest::Approx(domain_area(d)).epsilon(1e-13));
      CHECK(next.min_angle() >= angle0 / 2 - 1e-12);
      // old vertices keep their ids and positions
      for (std::size_t v = 0; v < m.num_vertices(); ++v) {
        CHECK(next.vertex(static_cast<int>(v)).x == m.vertex(static_cast<int>(v)).x);
        CHECK(next.vertex(static_cast<int>(v)).y == m.vertex(static_cast<int>(v)).y);
      }
      // marked triangles got smaller
      std::set<int> ms(marked.begin(), marked.end());
      for (std::size_t v = m.num_vertices(); v < next.num_vertices(); ++v) {
        const auto pe = next.parent_edge(static_cast<int>(v));
        const Point mid = 0.5 * (next.vertex(pe[0]) + next.vertex(pe[1]));
        CHECK(std::abs(mid.x - next.vertex(static_cast<int>(v)).x) < 1e-15);
        CHECK(std::abs(mid.y - next.vertex(static_cast<int>(v)).y) < 1e-15);
      }
      for (std::size_t v = 0; v < next.num_vertices(); ++v)
        CHECK(next.is_boundary_vertex(static_cast<int>(v)) ==
              on_domain_boundary(d, next.vertex(static_cast<int>(v))));
      m = next;
    }
  }
}

TEST_CASE("refinement is deterministic") {
  Mesh a = make_initial_mesh(Domain::LShape), b = make_initial_mesh(Domain::LShape);
  for (int s = 0; s < 5; ++s) {
    std::vector<int> marked{0, static_cast<int>(a.num_triangles()) - 1};
    a = refine_bisection(a, marked);
    b = refine_bisection(b, marked);
  }
  REQUIRE(a.num_triangles() == b.num_triangles());
  for (std::size_t t = 0; t < a.num_triangles(); ++t)
    CHECK(a.triangle(static_cast<int>(t)) == b.triangle(static_cast<int>(t)));
}

TEST_CASE("prolongation reproduces linear functions") {
  Mesh m0 = make_initial_mesh(Domain::LShape);
  Mesh m1 = refine_uniform(refine_bisection(m0, std::vector<int>{3, 4}));
  std::vector<double> v0(m0.num_vertices());
  auto f = [](Point p) { return 2.0 * p.x - 3.0 * p.y + 0.5; };
  for (std::size_t v = 0; v < m0.num_vertices(); ++v) v0[v] = f(m0.vertex(static_cast<int>(v)));
  const auto v1 = prolongate_nodal(m0, m1, v0);
  REQUIRE(v1.size() == m1.num_vertices());
  for (std::size_t v = 0; v < m1.num_vertices(); ++v)
    CHECK(v1[v] == doctest::Approx(f(m1.vertex(static_cast<int>(v)))).epsilon(1e-14));
  CHECK_THROWS_AS(prolongate_nodal(m0, m1, std::vector<double>(3)), std::invalid_argument);
}

TEST_CASE("element patch") {
  const Mesh m = make_initial_mesh(Domain::UnitSquare);
  for (std::size_t t = 0; t < m.num_triangles(); ++t) {
    const auto p = element_patch(m, static_cast<int>(t));
    CHECK(std::is_sorted(p.begin(), p.end()));
    CHECK(std::find(p.begin(), p.end(), static_cast<int>(t)) != p.end());
    CHECK(p.size() >= 2);
    CHECK(p.size() <= 4);
  }
  CHECK_THROWS_AS(element_patch(m, 99), std::out_of_range);
}

TEST_CASE("check_mesh detects a hanging node") {
  // two triangles over a unit square but one edge split on one side only
  std::vector<Point> v{{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0.5, 0.5}};
  std::vector<Triangle> t{{0, 1, 2}, {0, 4, 3}, {4, 2, 3}};
  const Mesh m(Domain::UnitSquare, v, t);
  CHECK_FALSE(check_mesh(m).ok());
}

TEST_CASE("write_mesh header") {
  const Mesh m = make_initial_mesh(Domain::UnitSquare);
  std::ostringstream os;
  write_mesh(os, m);
  std::istringstream is(os.str());
  int nv, nt, ne;
  is >> nv >> nt >> ne;
  CHECK(nv == 9);
  CHECK(nt == 8);
  CHECK(ne == 16);
}
