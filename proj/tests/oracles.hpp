// Test-only reference implementations, independent of the library's own
// solution paths: a finite-difference two-point BVP solver, a structured
// plain-Galerkin solver on the unit square, and the closed-form in-plane
// Newton potential of a flat triangle.
#pragma once

#include "cabem/mesh.hpp"
#include "cabem/types.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <cmath>
#include <random>
#include <vector>

namespace oracles {

using cabem::Index;
using cabem::Mat2;
using cabem::Vec2;
using cabem::Vec3;
using cabem::VecX;

/// Central finite differences for -a u'' + b u' + c u = 0, u(0)=u0, u(L)=uL,
/// on a uniform grid with n intervals. Returns all n+1 grid values.
inline std::vector<double> fd_edge_solve(double a, double b, double c, double L, double u0,
                                         double uL, int n) {
  const double h = L / n;
  std::vector<double> lower(n - 1), diag(n - 1), upper(n - 1), rhs(n - 1, 0.0);
  const double dl = -a / (h * h) - b / (2 * h);
  const double dd = 2 * a / (h * h) + c;
  const double du = -a / (h * h) + b / (2 * h);
  for (int i = 0; i < n - 1; ++i) {
    lower[i] = dl;
    diag[i] = dd;
    upper[i] = du;
  }
  rhs[0] -= dl * u0;
  rhs[n - 2] -= du * uL;
  // Thomas algorithm
  for (int i = 1; i < n - 1; ++i) {
    double m = lower[i] / diag[i - 1];
    diag[i] -= m * upper[i - 1];
    rhs[i] -= m * rhs[i - 1];
  }
  std::vector<double> u(n + 1);
  u[0] = u0;
  u[n] = uL;
  u[n - 1] = rhs[n - 2] / diag[n - 2];
  for (int i = n - 3; i >= 0; --i) u[i + 1] = (rhs[i] - upper[i] * u[i + 2]) / diag[i];
  return u;
}

/// Plain P1 Galerkin (no stabilization) for
/// -div(A grad u) + b.grad u + c u = 0 on the unit square, structured grid of
/// (n+1)^2 nodes with lower-left/upper-right diagonal split, Dirichlet data g
/// at the boundary nodes, sparse direct solve. node(i,j) = (i/n, j/n).
struct SquareGalerkin {
  int n;
  VecX values; // (n+1)^2

  double at(int i, int j) const { return values(i + (n + 1) * j); }
  double at_point(double x, double y) const {
    int i = static_cast<int>(llround(x * n));
    int j = static_cast<int>(llround(y * n));
    return at(i, j);
  }
};

inline SquareGalerkin square_galerkin(int n, const Mat2& A, const Vec2& b, double c,
                                      const std::function<double(double, double)>& g) {
  const int np = n + 1;
  auto id = [&](int i, int j) { return i + np * j; };
  std::vector<bool> bdry(np * np, false);
  VecX vals = VecX::Zero(np * np);
  for (int j = 0; j < np; ++j)
    for (int i = 0; i < np; ++i)
      if (i == 0 || j == 0 || i == n || j == n) {
        bdry[id(i, j)] = true;
        vals(id(i, j)) = g(double(i) / n, double(j) / n);
      }
  std::vector<int> inner(np * np, -1);
  int ni = 0;
  for (int k = 0; k < np * np; ++k)
    if (!bdry[k]) inner[k] = ni++;

  std::vector<Eigen::Triplet<double>> trips;
  VecX rhs = VecX::Zero(ni);
  auto add_tri = [&](int a0, int a1, int a2, const Vec2& p0, const Vec2& p1, const Vec2& p2) {
    Mat2 M;
    M.col(0) = p1 - p0;
    M.col(1) = p2 - p0;
    const double area = 0.5 * M.determinant();
    Mat2 Mi = M.inverse();
    std::array<Vec2, 3> grad;
    grad[1] = Mi.transpose().col(0);
    grad[2] = Mi.transpose().col(1);
    grad[0] = -grad[1] - grad[2];
    const int ids[3] = {a0, a1, a2};
    for (int i = 0; i < 3; ++i) {
      if (bdry[ids[i]]) continue;
      for (int j = 0; j < 3; ++j) {
        double v = area * grad[i].dot(A * grad[j]) + b.dot(grad[j]) * area / 3.0 +
                   c * area * (i == j ? 1.0 / 6.0 : 1.0 / 12.0);
        if (bdry[ids[j]]) rhs(inner[ids[i]]) -= v * vals(ids[j]);
        else trips.emplace_back(inner[ids[i]], inner[ids[j]], v);
      }
    }
  };
  const double h = 1.0 / n;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      Vec2 p00(i * h, j * h), p10((i + 1) * h, j * h), p01(i * h, (j + 1) * h),
          p11((i + 1) * h, (j + 1) * h);
      add_tri(id(i, j), id(i + 1, j), id(i + 1, j + 1), p00, p10, p11);
      add_tri(id(i, j), id(i + 1, j + 1), id(i, j + 1), p00, p11, p01);
    }
  Eigen::SparseMatrix<double> K(ni, ni);
  K.setFromTriplets(trips.begin(), trips.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(K);
  VecX sol = lu.solve(rhs);
  SquareGalerkin out;
  out.n = n;
  out.values = vals;
  for (int k = 0; k < np * np; ++k)
    if (inner[k] >= 0) out.values(k) = sol(inner[k]);
  return out;
}

/// In-plane Newton potential int_T 1/|x - p| dS_x of a flat triangle for a
/// point p in the same plane (outside edge lines): per-edge closed form.
inline double triangle_potential_inplane(const std::array<Vec2, 3>& tri, const Vec2& p) {
  double total = 0.0;
  const double orient =
      ((tri[1] - tri[0]).x() * (tri[2] - tri[0]).y() -
       (tri[1] - tri[0]).y() * (tri[2] - tri[0]).x()) > 0 ? 1.0 : -1.0;
  for (int i = 0; i < 3; ++i) {
    const Vec2 a = tri[i], b = tri[(i + 1) % 3];
    Vec2 t = b - a;
    const double len = t.norm();
    t /= len;
    const Vec2 m(orient * t.y(), -orient * t.x()); // outward in-plane normal
    const double td = (a - p).dot(m);              // signed distance to edge line
    const double lm = (a - p).dot(t), lp = (b - p).dot(t);
    const double Rm = (a - p).norm(), Rp = (b - p).norm();
    if (std::abs(td) < 1e-14) continue;
    total += td * std::log((Rp + lp) / (Rm + lm));
  }
  return total;
}

/// One-element meshes for operator tests.
inline cabem::PolyMesh unit_tet_mesh() {
  std::vector<Vec3> nodes{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  std::vector<std::vector<Index>> faces{{0, 2, 1}, {0, 1, 3}, {0, 3, 2}, {1, 2, 3}};
  std::vector<std::vector<std::pair<Index, int>>> elems{{{0, 0}, {1, 0}, {2, 0}, {3, 0}}};
  return cabem::build_poly_mesh(nodes, faces, elems);
}

inline cabem::PolyMesh unit_hex_mesh(const Vec3& shift = Vec3::Zero(), double scale = 1.0) {
  std::vector<Vec3> nodes;
  for (int k = 0; k < 2; ++k)
    for (int j = 0; j < 2; ++j)
      for (int i = 0; i < 2; ++i)
        nodes.push_back(scale * Vec3(i, j, k) + shift);
  auto id = [](int i, int j, int k) { return static_cast<Index>(i + 2 * j + 4 * k); };
  std::vector<std::vector<Index>> faces{
      {id(0, 0, 0), id(0, 1, 0), id(1, 1, 0), id(1, 0, 0)}, // bottom (z=0)
      {id(0, 0, 1), id(1, 0, 1), id(1, 1, 1), id(0, 1, 1)}, // top
      {id(0, 0, 0), id(1, 0, 0), id(1, 0, 1), id(0, 0, 1)}, // y=0
      {id(0, 1, 0), id(0, 1, 1), id(1, 1, 1), id(1, 1, 0)}, // y=1
      {id(0, 0, 0), id(0, 0, 1), id(0, 1, 1), id(0, 1, 0)}, // x=0
      {id(1, 0, 0), id(1, 1, 0), id(1, 1, 1), id(1, 0, 1)}, // x=1
  };
  std::vector<std::vector<std::pair<Index, int>>> elems{
      {{0, 0}, {1, 0}, {2, 0}, {3, 0}, {4, 0}, {5, 0}}};
  return cabem::build_poly_mesh(nodes, faces, elems);
}

inline cabem::PolyMesh random_prism_mesh(unsigned seed = 7) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> jitter(-0.04, 0.04);
  cabem::Tiling tiling;
  std::vector<Index> loop;
  for (int k = 0; k < 5; ++k) {
    double ang = 2 * M_PI * k / 5.0;
    tiling.nodes.emplace_back(0.5 + (0.33 + jitter(rng)) * std::cos(ang),
                              0.5 + (0.33 + jitter(rng)) * std::sin(ang));
    loop.push_back(static_cast<Index>(k));
  }
  tiling.polygons.push_back(loop);
  return cabem::build_prism_mesh(tiling, 1);
}

} // namespace oracles
