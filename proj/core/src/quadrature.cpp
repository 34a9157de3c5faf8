#include "cabem/quadrature.hpp"

#include "cabem/errors.hpp"

#include <cmath>
#include <mutex>
#include <vector>

namespace cabem {

namespace {

std::vector<GLPoint> make_gauss_legendre(int n) {
  // Newton iteration on P_n over [-1,1], mapped to [0,1]
  std::vector<GLPoint> pts(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    pts[i].x = 0.5 * (1.0 - x); // descending cos order -> ascending on [0,1]
    pts[i].w = 1.0 / ((1.0 - x * x) * dp * dp);
  }
  return pts;
}

std::mutex g_rule_mutex;
std::vector<std::vector<GLPoint>> g_rules;

inline Vec3 chi(const std::array<Vec3, 3>& v, double xi1, double xi2) {
  return v[0] + xi1 * (v[1] - v[0]) + xi2 * (v[2] - v[1]);
}

inline std::array<double, 3> bary(double xi1, double xi2) {
  return {1.0 - xi1, xi1 - xi2, xi2};
}

inline double tri_area(const std::array<Vec3, 3>& v) {
  return 0.5 * (v[1] - v[0]).cross(v[2] - v[0]).norm();
}

} // namespace

std::span<const GLPoint> gauss_legendre(int n) {
  if (n < 1 || n > 64) throw InconsistentDimensions("gauss order out of range");
  std::lock_guard<std::mutex> lock(g_rule_mutex);
  if (static_cast<int>(g_rules.size()) <= n) g_rules.resize(n + 1);
  if (g_rules[n].empty()) g_rules[n] = make_gauss_legendre(n);
  return g_rules[n];
}

std::vector<TrianglePoint> triangle_rule(const std::array<Vec3, 3>& tri, int order) {
  auto gl = gauss_legendre(order);
  std::vector<TrianglePoint> pts;
  pts.reserve(gl.size() * gl.size());
  const double factor = 2.0 * tri_area(tri);
  for (const auto& gu : gl)
    for (const auto& gv : gl) {
      const double xi1 = gu.x, xi2 = gu.x * gv.x;
      TrianglePoint tp;
      tp.p = chi(tri, xi1, xi2);
      tp.bary = bary(xi1, xi2);
      tp.w = factor * gu.w * gv.w * gu.x;
      pts.push_back(tp);
    }
  return pts;
}

namespace {

void separated(const std::array<Vec3, 3>& sv, const std::array<Vec3, 3>& tv, int order,
               std::vector<QuadEvent>& out) {
  auto src = triangle_rule(sv, order);
  auto tst = triangle_rule(tv, order);
  for (const auto& s : src)
    for (const auto& t : tst)
      out.push_back({s.p, t.p, s.bary, s.w * t.w});
}

void identical(const std::array<Vec3, 3>& v, int order, std::vector<QuadEvent>& out) {
  auto gl = gauss_legendre(order);
  const double factor = 4.0 * tri_area(v) * tri_area(v);
  for (const auto& gs : gl)
    for (const auto& gm : gl)
      for (const auto& gu : gl)
        for (const auto& gv : gl) {
          const double s = gs.x, mu = gm.x, u = gu.x, vv = gv.x;
          const double w =
              factor * gs.w * gm.w * gu.w * gv.w * s * (1.0 - s) * (1.0 - s) * u;
          // difference-vector wedges covering the upper half of the hexagon
          // T^ - T^; the lower half follows by swapping the two arguments
          const double xi[3][2] = {
              {(1.0 - s) * u, (1.0 - s) * u * vv},
              {s * mu + (1.0 - s) * u, (1.0 - s) * u * vv},
              {s + (1.0 - s) * u, (1.0 - s) * u * vv}};
          const double z[3][2] = {
              {s, s * mu}, {s * (1.0 - mu), s}, {-s * mu, s * (1.0 - mu)}};
          for (int j = 0; j < 3; ++j) {
            const double e1 = xi[j][0] + z[j][0], e2 = xi[j][1] + z[j][1];
            out.push_back({chi(v, xi[j][0], xi[j][1]), chi(v, e1, e2),
                           bary(xi[j][0], xi[j][1]), w});
            out.push_back({chi(v, e1, e2), chi(v, xi[j][0], xi[j][1]), bary(e1, e2), w});
          }
        }
}

void common_edge(const std::array<Vec3, 3>& sv, const std::array<Vec3, 3>& tv, int order,
                 std::vector<QuadEvent>& out) {
  auto gl = gauss_legendre(order);
  const double factor = 4.0 * tri_area(sv) * tri_area(tv);
  // relative coordinates c = (c1, c2, c3) with the scale w: the half with the
  // larger first simplex coordinate on the test panel (swap = false) or on
  // the source panel (swap = true); the corner singularity at c = 0 is split
  // into four kink-free Duffy subdomains
  for (const auto& gw : gl)
    for (const auto& gm : gl)
      for (const auto& g1 : gl)
        for (const auto& g2 : gl) {
          const double W = gw.x, mq = gm.x, a1 = g1.x, a2 = g2.x;
          const double base = factor * gw.w * gm.w * g1.w * g2.w * W * W * W;
          double c[4][3], jac[4];
          {
            const double m = mq / (1.0 + a1);
            c[0][0] = m; c[0][1] = m * a1; c[0][2] = m * a2;
            jac[0] = mq * mq / std::pow(1.0 + a1, 3);
            c[1][0] = m * a1; c[1][1] = m; c[1][2] = m * a2;
            jac[1] = jac[0];
          }
          {
            const double m = mq;
            const double gam1 = a1 * (1.0 - a2), gam2 = a1 * a2;
            c[2][0] = m * gam1; c[2][1] = m * gam2; c[2][2] = m;
            jac[2] = mq * mq * a1;
          }
          {
            const double gam1 = 1.0 - a1 * (1.0 - a2), gam2 = a1;
            const double ssum = gam1 + gam2;
            const double m = mq / ssum;
            c[3][0] = m * gam1; c[3][1] = m * gam2; c[3][2] = m;
            jac[3] = mq * mq * a1 / (ssum * ssum * ssum);
          }
          for (int sd = 0; sd < 4; ++sd) {
            const double x1a = W * (1.0 - c[sd][0]), x2a = W * c[sd][1];
            const double y1a = W, y2a = W * c[sd][2];
            // swap=false: source gets (x1a,x2a), test gets (y1a,y2a)
            out.push_back({chi(sv, x1a, x2a), chi(tv, y1a, y2a), bary(x1a, x2a),
                           base * jac[sd]});
            // swap=true: parameters exchanged between the panels
            out.push_back({chi(sv, y1a, y2a), chi(tv, x1a, x2a), bary(y1a, y2a),
                           base * jac[sd]});
          }
        }
}

void common_vertex(const std::array<Vec3, 3>& sv, const std::array<Vec3, 3>& tv, int order,
                   std::vector<QuadEvent>& out) {
  auto gl = gauss_legendre(order);
  const double factor = 4.0 * tri_area(sv) * tri_area(tv);
  for (const auto& ga : gl)
    for (const auto& gw : gl)
      for (const auto& g1 : gl)
        for (const auto& g2 : gl) {
          const double a = ga.x, w = gw.x, v1 = g1.x, v2 = g2.x;
          const double wt = factor * ga.w * gw.w * g1.w * g2.w * a * a * a * w;
          out.push_back({chi(sv, a, a * v1), chi(tv, a * w, a * w * v2),
                         bary(a, a * v1), wt});
          out.push_back({chi(sv, a * w, a * w * v1), chi(tv, a, a * v2),
                         bary(a * w, a * w * v1), wt});
        }
}

} // namespace

void pair_quadrature(const std::array<Vec3, 3>& source, const std::array<Vec3, 3>& test,
                     PairRelation relation, int order, std::vector<QuadEvent>& out) {
  switch (relation) {
    case PairRelation::Separated: separated(source, test, order, out); break;
    case PairRelation::Identical: identical(source, order, out); break;
    case PairRelation::CommonEdge: common_edge(source, test, order, out); break;
    case PairRelation::CommonVertex: common_vertex(source, test, order, out); break;
  }
}

} // namespace cabem
