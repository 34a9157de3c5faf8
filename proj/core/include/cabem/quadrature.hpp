#pragma once

#include "cabem/types.hpp"

#include <array>
#include <span>
#include <vector>

namespace cabem {

struct GLPoint {
  double x; // node in [0,1]
  double w;
};

/// Gauss-Legendre rule on [0,1], cached per order.
std::span<const GLPoint> gauss_legendre(int n);

/// One quadrature evaluation point of a Galerkin double integral over a pair
/// of flat triangles: x on the source panel, y on the test panel, with the
/// barycentric coordinates of x (source ordering) and a weight that already
/// includes both surface factors.
struct QuadEvent {
  Vec3 x;
  Vec3 y;
  std::array<double, 3> bary_x;
  double weight;
};

enum class PairRelation { Separated, CommonVertex, CommonEdge, Identical };

/// Sauter-Schwab style regularizing transforms for the double integral
/// int_X int_Y k(x, y) phi(x) ds_x ds_y over a pair of flat panels with a
/// kernel singularity up to |x-y|^{-2}. For the singular relations the shared
/// simplex must come first in both vertex lists (identical: same order;
/// common edge: shared edge = vertices 0,1 in the same order on both;
/// common vertex: shared vertex = vertex 0 on both). `order` is the number of
/// Gauss points per tensor direction. Events are appended to `out`.
void pair_quadrature(const std::array<Vec3, 3>& source, const std::array<Vec3, 3>& test,
                     PairRelation relation, int order, std::vector<QuadEvent>& out);

/// Quadrature points of a single flat triangle (collapsed tensor rule):
/// point, barycentric coordinates and weight including the surface factor.
struct TrianglePoint {
  Vec3 p;
  std::array<double, 3> bary;
  double w;
};

std::vector<TrianglePoint> triangle_rule(const std::array<Vec3, 3>& tri, int order);

} // namespace cabem
