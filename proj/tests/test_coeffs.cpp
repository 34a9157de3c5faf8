#include "cabem/coeffs.hpp"
#include "cabem/errors.hpp"
#include "cabem/mesh.hpp"

#include <doctest.h>

#include <cmath>

#include "oracles.hpp"

using namespace cabem;

TEST_CASE("constant coefficients project exactly") {
  PolyMesh m = build_unit_cube_tet_mesh(2);
  const double alpha = 0.37;
  const Vec3 b(1, 0, 0);
  CoefficientField cf = constant_coefficients(alpha * Mat3::Identity(), b, 0.0, m);
  for (Index e = 0; e < m.n_elements(); ++e) {
    CHECK((cf.element[e].A - alpha * Mat3::Identity()).norm() < 1e-14);
    CHECK((cf.element[e].b - b).norm() < 1e-14);
    CHECK(cf.element[e].c == 0.0);
    CHECK(cf.element[e].alpha == doctest::Approx(alpha).epsilon(1e-12));
  }
  for (Index f = 0; f < m.n_faces(); ++f) {
    // rigid transforms preserve alpha*I and shrink |b|
    CHECK((cf.face[f].A - alpha * Mat2::Identity()).norm() < 1e-13);
    CHECK(cf.face[f].b.norm() <= 1.0 + 1e-13);
    CHECK(cf.face[f].c == 0.0);
  }
  for (Index e = 0; e < m.n_edges(); ++e) {
    CHECK(cf.edge[e].a == doctest::Approx(alpha).epsilon(1e-12));
    CHECK(std::abs(cf.edge[e].b) <= 1.0 + 1e-13);
  }
}

TEST_CASE("convection normal to a face projects to zero") {
  PolyMesh m = oracles::unit_tet_mesh();
  CoefficientField cf = constant_coefficients(Mat3::Identity(), Vec3(1, 0, 0), 0.0, m);
  // face 2 of the tet lies in the plane x1 = 0
  Index f_x0 = kInvalidIndex;
  for (Index f = 0; f < m.n_faces(); ++f) {
    bool in_plane = true;
    for (Index nd : m.faces[f].loop) in_plane &= std::abs(m.nodes[nd].x()) < 1e-14;
    if (in_plane) f_x0 = f;
  }
  REQUIRE(f_x0 != kInvalidIndex);
  CHECK(cf.face[f_x0].b.norm() < 1e-14);
}

TEST_CASE("exp2 convection field") {
  CoefficientFunctions f = exp2_coefficients(1e-3);
  const Vec3 x(0, 0.5, 0);
  const Vec3 expected = 0.85 / std::sqrt(2.0) * Vec3(-1, 0, 1);
  CHECK((f.b(x) - expected).norm() < 1e-14);
  CHECK(f.b(x).norm() == doctest::Approx(0.85).epsilon(1e-12));
  // per-element constants are the vertex/centroid averages of the field
  PolyMesh m = paper_like_prism_mesh();
  CoefficientField cf = project_coefficients(f, m);
  Index e = 17 % m.n_elements();
  Vec3 avg = Vec3::Zero();
  const auto& el = m.elements[e];
  for (Index nd : el.nodes) avg += f.b(m.nodes[nd]);
  avg += f.b(el.centroid);
  avg /= double(el.nodes.size() + 1);
  CHECK((cf.element[e].b - avg).norm() < 1e-13);
}

TEST_CASE("peclet numbers") {
  SUBCASE("matching the first experiment scales") {
    CHECK(triangle_peclet(0.2165, 1.0, 1e-1) == doctest::Approx(2.165).epsilon(1e-12));
    CHECK(triangle_peclet(0.2165, 1.0, 2.5e-5) == doctest::Approx(8660.0).epsilon(1e-3));
  }
  SUBCASE("zero convection") { CHECK(triangle_peclet(0.5, 0.0, 1e-3) == 0.0); }
  SUBCASE("mesh peclet of the cube mesh") {
    PolyMesh m = build_unit_cube_tet_mesh(8);
    CoefficientField cf = project_coefficients(exp1_coefficients(1e-1), m);
    CHECK(mesh_peclet(m, cf) == doctest::Approx(std::sqrt(3.0) / 8.0 / 1e-1).epsilon(1e-12));
  }
}

TEST_CASE("stabilization rule") {
  CHECK(supg_delta(0.1, 1.0, 1.0) == 0.0);        // Pe = 0.1
  CHECK(supg_delta(0.1, 1.0, 1e-3) == 0.05);      // Pe = 100
  CHECK(supg_delta(0.2, 10.0, 1.0) == 0.0);       // Pe = 2 exactly: no stabilization
  CHECK(supg_delta(0.2, 10.1, 1.0) == 0.1);       // just above the threshold
}

TEST_CASE("invalid coefficients are rejected") {
  PolyMesh m = oracles::unit_tet_mesh();
  CoefficientFunctions bad;
  bad.A = [](const Vec3&) { return Mat3(-Mat3::Identity()); };
  bad.b = [](const Vec3&) { return Vec3::Zero(); };
  bad.c = [](const Vec3&) { return 0.0; };
  CHECK_THROWS_AS(project_coefficients(bad, m), NonSPDDiffusion);
  CoefficientFunctions neg;
  neg.A = [](const Vec3&) { return Mat3(Mat3::Identity()); };
  neg.b = [](const Vec3&) { return Vec3::Zero(); };
  neg.c = [](const Vec3&) { return -1.0; };
  CHECK_THROWS_AS(project_coefficients(neg, m), NegativeReaction);
}
