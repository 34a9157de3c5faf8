#include "cabem/bem.hpp"

#include "cabem/errors.hpp"
#include "cabem/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace cabem {

namespace {

struct TriData {
  std::array<Vec3, 3> v;
  std::array<int, 3> nodes;       // local aux indices
  std::array<Index, 3> sorted_gids;
  Vec3 normal = Vec3::Zero();
  Vec3 centroid = Vec3::Zero();
  double area = 0.0;
  double diam = 0.0;
  std::vector<TrianglePoint> pts; // cached rule at the regular order
};

struct PairSetup {
  PairRelation relation = PairRelation::Separated;
  std::array<Vec3, 3> sv, tv;    // reordered vertices (shared simplex first)
  std::array<int, 3> src_nodes;  // local aux ids in reordered source order
};

PairSetup classify(const TriData& src, const TriData& tst, const std::vector<Index>& gids) {
  PairSetup ps;
  std::array<Index, 3> sg, tg;
  for (int m = 0; m < 3; ++m) {
    sg[m] = gids[src.nodes[m]];
    tg[m] = gids[tst.nodes[m]];
  }
  std::vector<Index> shared;
  for (Index g : sg)
    if (std::find(tg.begin(), tg.end(), g) != tg.end()) shared.push_back(g);
  std::sort(shared.begin(), shared.end());

  auto arrange = [](const TriData& t, const std::array<Index, 3>& g,
                    std::span<const Index> lead, std::array<Vec3, 3>& verts,
                    std::array<int, 3>* nodes) {
    std::array<int, 3> order{};
    int pos = 0;
    for (Index want : lead)
      for (int m = 0; m < 3; ++m)
        if (g[m] == want) order[pos++] = m;
    for (int m = 0; m < 3; ++m) {
      bool used = false;
      for (int q = 0; q < pos; ++q) used = used || order[q] == m;
      if (!used) order[pos++] = m;
    }
    for (int m = 0; m < 3; ++m) {
      verts[m] = t.v[order[m]];
      if (nodes) (*nodes)[m] = t.nodes[order[m]];
    }
  };

  if (shared.size() == 2) {
    ps.relation = PairRelation::CommonEdge;
    arrange(src, sg, shared, ps.sv, &ps.src_nodes);
    arrange(tst, tg, shared, ps.tv, nullptr);
  } else if (shared.size() == 1) {
    ps.relation = PairRelation::CommonVertex;
    arrange(src, sg, shared, ps.sv, &ps.src_nodes);
    arrange(tst, tg, shared, ps.tv, nullptr);
  } else {
    ps.relation = PairRelation::Separated;
    ps.sv = src.v;
    ps.tv = tst.v;
    ps.src_nodes = src.nodes;
  }
  return ps;
}

} // namespace

ElementOperators assemble_boundary_operators(const ElementSurface& surf, const Kernel& kernel,
                                             const QuadratureOrders& orders) {
  const int nt = static_cast<int>(surf.tris.size());
  const int na = static_cast<int>(surf.gids.size());

  Vec3 bary = Vec3::Zero();
  for (const Vec3& p : surf.pos) bary += p;
  bary /= double(surf.pos.size());

  std::vector<TriData> tris(nt);
  for (int k = 0; k < nt; ++k) {
    TriData& t = tris[k];
    for (int m = 0; m < 3; ++m) {
      t.nodes[m] = surf.tris[k][m];
      t.v[m] = surf.pos[t.nodes[m]] - bary;
      t.sorted_gids[m] = surf.gids[t.nodes[m]];
    }
    std::sort(t.sorted_gids.begin(), t.sorted_gids.end());
    Vec3 cr = (t.v[1] - t.v[0]).cross(t.v[2] - t.v[0]);
    t.area = 0.5 * cr.norm();
    if (t.area < 1e-300) throw QuadratureBreakdown("degenerate surface triangle");
    t.normal = cr / (2.0 * t.area);
    t.centroid = (t.v[0] + t.v[1] + t.v[2]) / 3.0;
    t.diam = std::max({(t.v[0] - t.v[1]).norm(), (t.v[1] - t.v[2]).norm(),
                       (t.v[2] - t.v[0]).norm()});
    t.pts = triangle_rule(t.v, orders.regular);
  }

  ElementOperators ops;
  ops.V = MatX::Zero(nt, nt);
  ops.K = MatX::Zero(nt, na);
  ops.M = MatX::Zero(nt, na);
  for (int k = 0; k < nt; ++k)
    for (int m = 0; m < 3; ++m) ops.M(k, tris[k].nodes[m]) += tris[k].area / 3.0;

  const double lambda = kernel.lambda;
  const Vec3 hb = kernel.half_Ainv_b;
  const Vec3 b = kernel.b;
  const bool iso = kernel.isotropic;
  const double isr = std::sqrt(kernel.inv_alpha);

  std::vector<QuadEvent> events;
  events.reserve(8192);
  std::vector<double> args, rhos, rdn;
  args.reserve(8192); rhos.reserve(8192); rdn.reserve(8192);

  for (int l = 0; l < nt; ++l) {     // source panel (x)
    const TriData& src = tris[l];
    const double bdotn = b.dot(src.normal);
    for (int k = 0; k < nt; ++k) {   // test panel (y)
      const TriData& tst = tris[k];
      events.clear();

      PairSetup ps;
      if (k == l) {
        ps.relation = PairRelation::Identical;
        ps.sv = src.v;
        ps.tv = src.v;
        ps.src_nodes = src.nodes;
        pair_quadrature(ps.sv, ps.tv, ps.relation, orders.singular, events);
      } else {
        ps = classify(src, tst, surf.gids);
        if (ps.relation == PairRelation::Separated) {
          const double dist = (src.centroid - tst.centroid).norm();
          const bool near = dist < orders.near_factor * std::max(src.diam, tst.diam) +
                                       0.5 * (src.diam + tst.diam);
          if (!near) {
            // fast path: tensor product of the cached per-triangle rules
            for (const auto& s : src.pts)
              for (const auto& t : tst.pts)
                events.push_back({s.p, t.p, s.bary, s.w * t.w});
          } else {
            pair_quadrature(ps.sv, ps.tv, ps.relation, orders.singular, events);
          }
        } else {
          pair_quadrature(ps.sv, ps.tv, ps.relation, orders.singular, events);
        }
      }

      const size_t ne = events.size();
      args.resize(ne); rhos.resize(ne); rdn.resize(ne);
      for (size_t i = 0; i < ne; ++i) {
        const Vec3 r = events[i].x - events[i].y;
        const double rho = iso ? r.norm() * isr : std::sqrt(r.dot(kernel.A_inv * r));
        rhos[i] = rho;
        rdn[i] = r.dot(src.normal);
        args[i] = -hb.dot(r) - lambda * rho;
      }
      Eigen::Map<Eigen::ArrayXd> argm(args.data(), static_cast<long>(ne));
      argm = argm.exp();

      double vsum = 0.0;
      double k0 = 0.0, k1 = 0.0, k2 = 0.0;
      for (size_t i = 0; i < ne; ++i) {
        const double rho = rhos[i];
        const double base = events[i].weight * args[i] / rho;
        vsum += base;
        const double coef = base * (0.5 * bdotn - (lambda * rho + 1.0) * rdn[i] / (rho * rho));
        k0 += coef * events[i].bary_x[0];
        k1 += coef * events[i].bary_x[1];
        k2 += coef * events[i].bary_x[2];
      }
      ops.V(k, l) += kernel.scale * vsum;
      ops.K(k, ps.src_nodes[0]) += kernel.scale * k0;
      ops.K(k, ps.src_nodes[1]) += kernel.scale * k1;
      ops.K(k, ps.src_nodes[2]) += kernel.scale * k2;
    }
  }

  if (!ops.V.allFinite() || !ops.K.allFinite())
    throw QuadratureBreakdown("non-finite boundary operator entry");
  return ops;
}

MatX steklov_matrix(const ElementOperators& ops) {
  Eigen::PartialPivLU<MatX> lu(ops.V);
  const VecX diag = lu.matrixLU().diagonal().cwiseAbs();
  if (diag.minCoeff() <= 1e-14 * diag.maxCoeff())
    throw SingularV("single layer matrix numerically singular");
  MatX rhs = 0.5 * ops.M + ops.K;
  MatX X = lu.solve(rhs);
  return ops.M.transpose() * X;
}

ElementOperators element_operators(const ElementSurface& surf, const Kernel& kernel,
                                   const QuadratureOrders& orders) {
  ElementOperators ops = assemble_boundary_operators(surf, kernel, orders);
  ops.S = steklov_matrix(ops);
  return ops;
}

} // namespace cabem
