#include "cabem/auxtri.hpp"
#include "cabem/errors.hpp"
#include "cabem/geometry2d.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "oracles.hpp"

using namespace cabem;

namespace {

std::vector<Vec2> regular_polygon(int n, double r = 1.0) {
  std::vector<Vec2> poly;
  for (int k = 0; k < n; ++k) {
    double ang = 2 * M_PI * k / n;
    poly.emplace_back(r * std::cos(ang), r * std::sin(ang));
  }
  return poly;
}

double uniformity_ratio(const FaceTriangulation& ft) {
  double hmin = 1e300, hmax = 0;
  for (double h : ft.tri_diameter) {
    hmin = std::min(hmin, h);
    hmax = std::max(hmax, h);
  }
  return hmax / hmin;
}

} // namespace

TEST_CASE("fan triangulation basics") {
  SUBCASE("equilateral triangle, level 0, no convection") {
    auto poly = regular_polygon(3);
    FaceTriangulation ft = build_face_triangulation(poly, 0, Vec2::Zero(), 1.0, {});
    CHECK(ft.triangles.size() == 3);
    CHECK(ft.vertices.size() == 4);
    CHECK((ft.center - Vec2(0, 0)).norm() < 1e-12); // incenter of the regular triangle
  }
  SUBCASE("pentagon, level 2") {
    auto poly = regular_polygon(5);
    FaceTriangulation ft = build_face_triangulation(poly, 2, Vec2::Zero(), 1.0, {});
    CHECK(ft.triangles.size() == 5 * 16);
    CHECK(ft.n_boundary == 20);
    // every loop edge is split into 4 equal segments
    for (int k = 0; k < 5; ++k) {
      for (int j = 0; j < 4; ++j) {
        Vec2 a = ft.vertices[ft.boundary_vertex(k, j)];
        Vec2 b = ft.vertices[ft.boundary_vertex(k, j + 1)];
        Vec2 expect = poly[k] + (poly[(k + 1) % 5] - poly[k]) * (j + 0.5) / 4.0;
        CHECK((0.5 * (a + b) - expect).norm() < 1e-12);
      }
    }
  }
}

TEST_CASE("convection shift of the fan center") {
  std::vector<Vec2> square{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  SUBCASE("strong convection moves the center half way to the outflow") {
    ShiftPolicy pol;
    FaceTriangulation ft = build_face_triangulation(square, 1, Vec2(1, 0), 1e-4, pol);
    CHECK((ft.center - Vec2(0.75, 0.5)).norm() < 1e-12);
    CHECK(ft.beta_used == doctest::Approx(0.5));
  }
  SUBCASE("no shift below the Peclet threshold") {
    FaceTriangulation ft = build_face_triangulation(square, 1, Vec2(1, 0), 1.0, {});
    CHECK((ft.center - Vec2(0.5, 0.5)).norm() < 1e-12);
    CHECK(ft.beta_used == 0.0);
  }
  SUBCASE("shift disabled by policy") {
    ShiftPolicy off;
    off.enabled = false;
    FaceTriangulation ft = build_face_triangulation(square, 1, Vec2(1, 0), 1e-4, off);
    CHECK((ft.center - Vec2(0.5, 0.5)).norm() < 1e-12);
  }
  SUBCASE("shifted center stays inside and keeps the fan valid") {
    auto poly = regular_polygon(7, 0.8);
    for (double angle : {0.0, 0.7, 2.1, 4.4}) {
      Vec2 b(std::cos(angle), std::sin(angle));
      FaceTriangulation ft = build_face_triangulation(poly, 2, b, 1e-5, {});
      CHECK(point_in_polygon(poly, ft.center, 0.0));
      CHECK(fan_star_shaped(poly, ft.center));
    }
  }
}

TEST_CASE("red refinement preserves the uniformity ratio") {
  auto poly = regular_polygon(5);
  FaceTriangulation f1 = build_face_triangulation(poly, 1, Vec2::Zero(), 1.0, {});
  FaceTriangulation f2 = build_face_triangulation(poly, 2, Vec2::Zero(), 1.0, {});
  FaceTriangulation f3 = build_face_triangulation(poly, 3, Vec2::Zero(), 1.0, {});
  CHECK(uniformity_ratio(f1) == doctest::Approx(uniformity_ratio(f2)).epsilon(1e-12));
  CHECK(uniformity_ratio(f2) == doctest::Approx(uniformity_ratio(f3)).epsilon(1e-12));
}

TEST_CASE("skeleton of a single tetrahedron at level 0") {
  PolyMesh m = oracles::unit_tet_mesh();
  CoefficientField cf = constant_coefficients(Mat3::Identity(), Vec3::Zero(), 0.0, m);
  SkeletonMesh skel = build_skeleton_mesh(m, 0, cf, {});
  size_t ntri = 0;
  for (auto& sf : skel.faces) ntri += sf.tri.triangles.size();
  CHECK(ntri == 12);
  CHECK(skel.n_aux() == 8); // 4 mesh nodes + 4 face centers
  for (Index i = 0; i < skel.n_aux(); ++i) CHECK(skel.aux_dirichlet[i]);
}

TEST_CASE("skeleton conformity on the n=1 cube") {
  PolyMesh m = build_unit_cube_tet_mesh(1);
  CoefficientField cf = constant_coefficients(Mat3::Identity(), Vec3(1, 0, 0), 0.0, m);
  SkeletonMesh skel = build_skeleton_mesh(m, 1, cf, {});
  const int seg = 2;
  SUBCASE("edges carry 2^l + 1 nodes and interior ids are shared") {
    for (Index f = 0; f < m.n_faces(); ++f) {
      const SkeletonFace& sf = skel.faces[f];
      for (size_t k = 0; k < m.faces[f].loop.size(); ++k) {
        // boundary ids along each loop edge match the canonical edge samples
        for (int j = 0; j <= seg; ++j) {
          Index gid = sf.global_ids[sf.tri.boundary_vertex(static_cast<int>(k), j) %
                                    sf.tri.n_boundary];
          Vec3 pos = skel.aux_coords[gid];
          Vec3 expect = m.nodes[m.faces[f].loop[k]] +
                        (m.nodes[m.faces[f].loop[(k + 1) % m.faces[f].loop.size()]] -
                         m.nodes[m.faces[f].loop[k]]) *
                            (double(j) / seg);
          CHECK((pos - expect).norm() < 1e-12);
        }
      }
    }
  }
  SUBCASE("element surfaces are closed and conforming") {
    for (Index e = 0; e < m.n_elements(); ++e) {
      ElementSurface surf = element_surface(m, skel, e);
      std::map<std::pair<int, int>, int> undirected;
      for (const auto& t : surf.tris)
        for (int k = 0; k < 3; ++k) {
          int a = t[k], b = t[(k + 1) % 3];
          undirected[{std::min(a, b), std::max(a, b)}]++;
        }
      for (auto& [key, cnt] : undirected) CHECK(cnt == 2);
    }
  }
  SUBCASE("interior-face ids identical from both incident elements") {
    for (Index f = 0; f < m.n_faces(); ++f) {
      if (m.faces[f].boundary) continue;
      ElementSurface s0 = element_surface(m, skel, m.faces[f].elements[0]);
      ElementSurface s1 = element_surface(m, skel, m.faces[f].elements[1]);
      std::set<Index> g0(s0.gids.begin(), s0.gids.end());
      for (Index gid : skel.faces[f].global_ids) CHECK(g0.count(gid) == 1);
      std::set<Index> g1(s1.gids.begin(), s1.gids.end());
      for (Index gid : skel.faces[f].global_ids) CHECK(g1.count(gid) == 1);
    }
  }
}

TEST_CASE("per-element surface triangle count at level 2") {
  PolyMesh m = oracles::random_prism_mesh();
  CoefficientField cf = constant_coefficients(Mat3::Identity(), Vec3::Zero(), 0.0, m);
  SkeletonMesh skel = build_skeleton_mesh(m, 2, cf, {});
  ElementSurface surf = element_surface(m, skel, 0);
  size_t expected = 0;
  for (Index f : m.elements[0].faces) expected += m.faces[f].loop.size() * 16;
  CHECK(surf.tris.size() == expected);
}

TEST_CASE("dirichlet flags cover exactly the boundary skeleton") {
  PolyMesh m = build_unit_cube_tet_mesh(2);
  CoefficientField cf = constant_coefficients(Mat3::Identity(), Vec3::Zero(), 0.0, m);
  SkeletonMesh skel = build_skeleton_mesh(m, 1, cf, {});
  for (Index i = 0; i < skel.n_aux(); ++i) {
    const Vec3& p = skel.aux_coords[i];
    bool on_boundary = false;
    for (int d = 0; d < 3; ++d)
      on_boundary |= std::abs(p[d]) < 1e-12 || std::abs(p[d] - 1.0) < 1e-12;
    CHECK(skel.aux_dirichlet[i] == on_boundary);
  }
}
