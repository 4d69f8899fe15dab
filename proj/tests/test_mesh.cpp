#include <doctest.h>

#include <cmath>
#include <sstream>

#include "cusp/mesh.hpp"

using namespace cusp;

TEST_CASE("reference triangle meshed exactly") {
  for (int N : {2, 8, 32}) {
    const GradedMesh m = build_cusp_mesh(1.0, N, 1.0);
    CHECK(m.total_area() == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(std::abs(m.total_area() - m.domain_area()) <= 1e-10);
    CHECK(m.area_gap() <= 1e-10);
    CHECK(m.diameter() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  }
}

TEST_CASE("all triangles positively oriented") {
  for (double g1 : {1.0, 1.5, 2.0, 3.0}) {
    const GradedMesh m = build_cusp_mesh(g1, 12, default_kappa(g1));
    for (int t = 0; t < static_cast<int>(m.triangles.size()); ++t)
      CHECK(m.triangle_area(t) > 0.0);
    CHECK(static_cast<int>(m.triangles.size()) == 12 * 12);
  }
}

TEST_CASE("boundary vertices lie on the cusp curve") {
  const GradedMesh m = build_cusp_mesh(2.0, 10, 2.0);
  for (const auto& v : m.vertices) {
    CHECK(v[0] >= -1e-15);
    CHECK(v[0] <= std::pow(v[1], 2.0) + 1e-12);
  }
}

TEST_CASE("polygonal area gap decays at second order") {
  const double g1 = 2.0;
  const double gap16 = build_cusp_mesh(g1, 16, g1).area_gap();
  const double gap32 = build_cusp_mesh(g1, 32, g1).area_gap();
  const double gap64 = build_cusp_mesh(g1, 64, g1).area_gap();
  CHECK(gap16 / gap32 >= 3.0);
  CHECK(gap32 / gap64 >= 3.0);
}

TEST_CASE("midpoint rule integrates low-order polynomials") {
  const GradedMesh m = build_reference_mesh(24, 1.0);
  CHECK(integrate(m, [](double, double) { return 1.0; }) ==
        doctest::Approx(0.5).epsilon(1e-12));
  // int_T x2 over {0 < x1 < x2 < 1} = 1/3; exact for the order-2 rule
  CHECK(integrate(m, [](double, double y) { return y; }) ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(integrate(m, [](double x, double) { return x; }) ==
        doctest::Approx(1.0 / 6.0).epsilon(1e-12));
}

TEST_CASE("quality metrics are sane") {
  const MeshQuality q = mesh_quality(build_cusp_mesh(2.0, 16, 2.0));
  // the grading is deliberately anisotropic near the tip
  CHECK(q.min_angle_deg > 0.0);
  CHECK(q.min_angle_deg < 61.0);
  CHECK(q.max_aspect >= 1.0);
  CHECK(q.h_min > 0.0);
  CHECK(q.h_min <= q.h_max);
}

TEST_CASE("mesh io round trip is bit exact") {
  const GradedMesh m = build_cusp_mesh(1.7, 9, 1.7);
  std::stringstream ss;
  write_mesh(m, ss);
  const GradedMesh r = read_mesh(ss);
  REQUIRE(r.vertices.size() == m.vertices.size());
  REQUIRE(r.triangles.size() == m.triangles.size());
  for (size_t i = 0; i < m.vertices.size(); ++i) {
    CHECK(r.vertices[i][0] == m.vertices[i][0]);
    CHECK(r.vertices[i][1] == m.vertices[i][1]);
  }
  for (size_t i = 0; i < m.triangles.size(); ++i)
    CHECK(r.triangles[i] == m.triangles[i]);
  CHECK(r.gamma1 == m.gamma1);
  CHECK(r.kappa == m.kappa);
}

TEST_CASE("invalid build parameters rejected") {
  CHECK_THROWS_AS(build_cusp_mesh(2.0, 1, 2.0), Error);
  CHECK_THROWS_AS(build_cusp_mesh(2.0, 8, 0.5), Error);
  CHECK_THROWS_AS(build_cusp_mesh(0.5, 8, 1.0), Error);
}

TEST_CASE("default grading") {
  CHECK(default_kappa(1.0) == 1.0);
  CHECK(default_kappa(2.5) == 2.5);
}
