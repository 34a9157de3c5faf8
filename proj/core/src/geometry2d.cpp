#include "cabem/geometry2d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cabem {

double polygon_area(const std::vector<Vec2>& poly) {
  double a2 = 0.0;
  const size_t m = poly.size();
  for (size_t i = 0; i < m; ++i) {
    const Vec2& p = poly[i];
    const Vec2& q = poly[(i + 1) % m];
    a2 += p.x() * q.y() - q.x() * p.y();
  }
  return 0.5 * a2;
}

double polygon_diameter(const std::vector<Vec2>& poly) {
  double d = 0.0;
  for (size_t i = 0; i < poly.size(); ++i)
    for (size_t j = i + 1; j < poly.size(); ++j)
      d = std::max(d, (poly[i] - poly[j]).norm());
  return d;
}

Vec2 polygon_centroid(const std::vector<Vec2>& poly) {
  double a2 = 0.0;
  Vec2 c = Vec2::Zero();
  const size_t m = poly.size();
  for (size_t i = 0; i < m; ++i) {
    const Vec2& p = poly[i];
    const Vec2& q = poly[(i + 1) % m];
    double w = p.x() * q.y() - q.x() * p.y();
    a2 += w;
    c += w * (p + q);
  }
  if (std::abs(a2) < 1e-300) {
    c = Vec2::Zero();
    for (const Vec2& p : poly) c += p;
    return c / double(m);
  }
  return c / (3.0 * a2);
}

std::pair<Vec2, double> chebyshev_center(const std::vector<Vec2>& poly) {
  // maximize r subject to n_i . c - d_i >= r for all edge lines, where n_i is
  // the inward unit normal of edge i. An optimal vertex of this 3-variable LP
  // has three active constraints; enumerate all triples.
  const size_t m = poly.size();
  std::vector<Vec2> normals(m);
  std::vector<double> offsets(m);
  const double orient = polygon_area(poly) >= 0 ? 1.0 : -1.0;
  for (size_t i = 0; i < m; ++i) {
    Vec2 t = poly[(i + 1) % m] - poly[i];
    double len = t.norm();
    if (len < 1e-300) return {polygon_centroid(poly), 0.0};
    Vec2 n(-t.y() / len, t.x() / len); // inward for ccw
    n *= orient;
    normals[i] = n;
    offsets[i] = n.dot(poly[i]);
  }
  auto min_slack = [&](const Vec2& c) {
    double s = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < m; ++i) s = std::min(s, normals[i].dot(c) - offsets[i]);
    return s;
  };

  Vec2 best = polygon_centroid(poly);
  double best_r = min_slack(best);
  for (size_t i = 0; i < m; ++i)
    for (size_t j = i + 1; j < m; ++j)
      for (size_t k = j + 1; k < m; ++k) {
        Eigen::Matrix3d A;
        A << normals[i].x(), normals[i].y(), -1.0,
             normals[j].x(), normals[j].y(), -1.0,
             normals[k].x(), normals[k].y(), -1.0;
        if (std::abs(A.determinant()) < 1e-14) continue;
        Vec3 rhs(offsets[i], offsets[j], offsets[k]);
        Vec3 sol = A.partialPivLu().solve(rhs);
        Vec2 c(sol.x(), sol.y());
        double r = min_slack(c);
        if (r > best_r) {
          best_r = r;
          best = c;
        }
      }
  return {best, best_r};
}

bool fan_star_shaped(const std::vector<Vec2>& poly, const Vec2& center) {
  const size_t m = poly.size();
  const double diam = polygon_diameter(poly);
  const double tol = 1e-12 * diam * diam;
  const double orient = polygon_area(poly) >= 0 ? 1.0 : -1.0;
  for (size_t i = 0; i < m; ++i) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[(i + 1) % m];
    double cross = (b.x() - a.x()) * (center.y() - a.y()) -
                   (b.y() - a.y()) * (center.x() - a.x());
    if (orient * cross <= tol) return false;
  }
  return true;
}

double ray_to_boundary(const std::vector<Vec2>& poly, const Vec2& origin, const Vec2& dir) {
  const size_t m = poly.size();
  double best = 0.0;
  for (size_t i = 0; i < m; ++i) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[(i + 1) % m];
    Vec2 e = b - a;
    double denom = dir.x() * (-e.y()) - dir.y() * (-e.x());
    if (std::abs(denom) < 1e-300) continue;
    // origin + t*dir = a + s*e
    double t = ((a.x() - origin.x()) * (-e.y()) - (a.y() - origin.y()) * (-e.x())) / denom;
    double s = (dir.x() * (a.y() - origin.y()) - dir.y() * (a.x() - origin.x())) / (-denom);
    if (t > 1e-14 && s >= -1e-12 && s <= 1.0 + 1e-12) {
      if (best == 0.0 || t < best) best = t;
    }
  }
  return best;
}

bool point_in_polygon(const std::vector<Vec2>& poly, const Vec2& p, double tol) {
  // signed-distance style test: inside if the minimum signed distance to all
  // edges (ccw inward positive) exceeds tol
  const size_t m = poly.size();
  const double orient = polygon_area(poly) >= 0 ? 1.0 : -1.0;
  double minsd = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < m; ++i) {
    Vec2 t = poly[(i + 1) % m] - poly[i];
    double len = t.norm();
    if (len < 1e-300) continue;
    Vec2 n(-t.y() / len, t.x() / len);
    minsd = std::min(minsd, orient * n.dot(p - poly[i]));
  }
  return minsd > tol;
}

std::vector<Vec2> clip_to_box(const std::vector<Vec2>& poly, double xmin, double xmax,
                              double ymin, double ymax) {
  auto clip_half = [](const std::vector<Vec2>& in, auto inside, auto intersect) {
    std::vector<Vec2> out;
    const size_t m = in.size();
    for (size_t i = 0; i < m; ++i) {
      const Vec2& cur = in[i];
      const Vec2& nxt = in[(i + 1) % m];
      bool ci = inside(cur), ni = inside(nxt);
      if (ci) out.push_back(cur);
      if (ci != ni) out.push_back(intersect(cur, nxt));
    }
    return out;
  };
  std::vector<Vec2> r = poly;
  auto lerp = [](const Vec2& a, const Vec2& b, double t) { return Vec2(a + t * (b - a)); };
  r = clip_half(r, [&](const Vec2& p) { return p.x() >= xmin; },
                [&](const Vec2& a, const Vec2& b) { return lerp(a, b, (xmin - a.x()) / (b.x() - a.x())); });
  if (r.empty()) return r;
  r = clip_half(r, [&](const Vec2& p) { return p.x() <= xmax; },
                [&](const Vec2& a, const Vec2& b) { return lerp(a, b, (xmax - a.x()) / (b.x() - a.x())); });
  if (r.empty()) return r;
  r = clip_half(r, [&](const Vec2& p) { return p.y() >= ymin; },
                [&](const Vec2& a, const Vec2& b) { return lerp(a, b, (ymin - a.y()) / (b.y() - a.y())); });
  if (r.empty()) return r;
  r = clip_half(r, [&](const Vec2& p) { return p.y() <= ymax; },
                [&](const Vec2& a, const Vec2& b) { return lerp(a, b, (ymax - a.y()) / (b.y() - a.y())); });
  return r;
}

} // namespace cabem
