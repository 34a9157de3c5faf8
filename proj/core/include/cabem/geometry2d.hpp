#pragma once

#include "cabem/types.hpp"

#include <vector>

namespace cabem {

double polygon_area(const std::vector<Vec2>& poly);
double polygon_diameter(const std::vector<Vec2>& poly);
Vec2 polygon_centroid(const std::vector<Vec2>& poly);

/// Chebyshev center of a polygon: the point maximizing the minimum signed
/// distance to the edge lines (the incircle center for triangles). Solved by
/// enumerating triples of active edge constraints. Returns {center, radius};
/// radius <= 0 means no valid center exists (polygon not star-shaped enough).
std::pair<Vec2, double> chebyshev_center(const std::vector<Vec2>& poly);

/// True if the fan triangulation about `center` is valid: every triangle
/// (poly[i], poly[i+1], center) has positive area above the degeneracy
/// threshold 1e-12 * diam^2.
bool fan_star_shaped(const std::vector<Vec2>& poly, const Vec2& center);

/// Distance from `origin` to the polygon boundary along direction `dir`
/// (unit). Returns 0 if no positive intersection exists.
double ray_to_boundary(const std::vector<Vec2>& poly, const Vec2& origin, const Vec2& dir);

/// Point-in-polygon test (winding), with `tol` treated as inside margin.
bool point_in_polygon(const std::vector<Vec2>& poly, const Vec2& p, double tol = 0.0);

/// Sutherland-Hodgman clip of a convex ccw polygon against the axis-aligned
/// box [xmin,xmax] x [ymin,ymax].
std::vector<Vec2> clip_to_box(const std::vector<Vec2>& poly, double xmin, double xmax,
                              double ymin, double ymax);

} // namespace cabem
