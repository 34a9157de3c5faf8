#include "cabem/auxtri.hpp"

#include "cabem/errors.hpp"
#include "cabem/geometry2d.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace cabem {

namespace {

struct WorkingTri {
  std::vector<Vec2> verts;
  std::vector<long> bnum; // boundary arclength numerator at denominator 2^level, -1 = interior
  std::vector<std::array<int, 3>> tris;
};

// midpoint boundary bookkeeping: two boundary vertices lie on the same loop
// edge iff their numerators fit inside one segment [e*2^l, (e+1)*2^l], with
// wrap-around for the last loop edge through corner 0
long boundary_midpoint(long n1, long n2, int n_loop, int level) {
  if (n1 < 0 || n2 < 0) return -1;
  const long seg = 1L << level;
  const long total = n_loop * seg;
  long lo = std::min(n1, n2), hi = std::max(n1, n2);
  if (hi - lo <= seg && (lo / seg) * seg + seg >= hi) {
    long e = lo / seg;
    if (hi <= (e + 1) * seg) return (lo + hi) / 2;
  }
  if (lo == 0 && hi >= total - seg) { // wrap edge into corner 0
    long mid = (total + hi) / 2;
    return mid % total;
  }
  return -1;
}

void red_refine(WorkingTri& w, int n_loop, int level) {
  std::map<std::array<int, 2>, int> midpoint;
  auto get_mid = [&](int a, int b) {
    std::array<int, 2> key{std::min(a, b), std::max(a, b)};
    auto [it, inserted] = midpoint.try_emplace(key, static_cast<int>(w.verts.size()));
    if (inserted) {
      w.verts.push_back(0.5 * (w.verts[a] + w.verts[b]));
      w.bnum.push_back(boundary_midpoint(w.bnum[a], w.bnum[b], n_loop, level));
    }
    return it->second;
  };
  std::vector<std::array<int, 3>> out;
  out.reserve(w.tris.size() * 4);
  for (const auto& t : w.tris) {
    int m01 = get_mid(t[0], t[1]);
    int m12 = get_mid(t[1], t[2]);
    int m20 = get_mid(t[2], t[0]);
    out.push_back({t[0], m01, m20});
    out.push_back({m01, t[1], m12});
    out.push_back({m20, m12, t[2]});
    out.push_back({m01, m12, m20});
  }
  w.tris = std::move(out);
}

} // namespace

FaceTriangulation build_face_triangulation(const std::vector<Vec2>& polygon, int level,
                                           const Vec2& b_F, double alpha_F,
                                           const ShiftPolicy& shift) {
  const int n = static_cast<int>(polygon.size());
  if (n < 3) throw NonStarShapedFace("polygon with fewer than 3 corners");
  if (level < 0) throw InconsistentDimensions("negative refinement level");

  auto [center, radius] = chebyshev_center(polygon);
  if (radius <= 0 || !fan_star_shaped(polygon, center))
    throw NonStarShapedFace("no valid fan center found");

  double beta_used = 0.0;
  const double bnorm = b_F.norm();
  const double diam = polygon_diameter(polygon);
  if (shift.enabled && bnorm > 0 && alpha_F > 0 &&
      diam * bnorm / alpha_F > shift.peclet_threshold) {
    Vec2 dir = b_F / bnorm;
    double tmax = ray_to_boundary(polygon, center, dir);
    double beta = shift.beta;
    while (beta > 1e-3) {
      Vec2 cand = center + beta * tmax * dir;
      if (fan_star_shaped(polygon, cand)) {
        center = cand;
        beta_used = beta;
        break;
      }
      beta *= 0.5;
    }
  }

  WorkingTri w;
  const long seg = 1L << level;
  w.verts = polygon;
  for (int i = 0; i < n; ++i) w.bnum.push_back(static_cast<long>(i) * seg);
  w.verts.push_back(center);
  w.bnum.push_back(-1);
  for (int i = 0; i < n; ++i) w.tris.push_back({i, (i + 1) % n, n});
  for (int l = 0; l < level; ++l) red_refine(w, n, level);

  // normalize: boundary vertices in arclength order first, interior after
  FaceTriangulation ft;
  ft.level = level;
  ft.n_loop = n;
  ft.n_boundary = n * static_cast<int>(seg);
  ft.center = center;
  ft.beta_used = beta_used;

  std::vector<int> perm(w.verts.size(), -1);
  std::vector<std::pair<long, int>> boundary;
  for (size_t i = 0; i < w.verts.size(); ++i)
    if (w.bnum[i] >= 0) boundary.emplace_back(w.bnum[i], static_cast<int>(i));
  std::sort(boundary.begin(), boundary.end());
  if (static_cast<int>(boundary.size()) != ft.n_boundary)
    throw InconsistentDimensions("boundary vertex count mismatch in face triangulation");
  int pos = 0;
  for (auto& [num, idx] : boundary) perm[idx] = pos++;
  for (size_t i = 0; i < w.verts.size(); ++i)
    if (perm[i] < 0) perm[i] = pos++;

  ft.vertices.resize(w.verts.size());
  for (size_t i = 0; i < w.verts.size(); ++i) ft.vertices[perm[i]] = w.verts[i];
  ft.triangles.reserve(w.tris.size());
  for (const auto& t : w.tris)
    ft.triangles.push_back({perm[t[0]], perm[t[1]], perm[t[2]]});

  const double orient = polygon_area(polygon) >= 0 ? 1.0 : -1.0;
  ft.tri_diameter.reserve(ft.triangles.size());
  const double area_tol = 1e-14 * diam * diam;
  for (auto& t : ft.triangles) {
    const Vec2 &a = ft.vertices[t[0]], &b = ft.vertices[t[1]], &c = ft.vertices[t[2]];
    double cross = (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
    if (orient * cross <= 0) std::swap(t[1], t[2]);
    if (std::abs(cross) * 0.5 <= area_tol)
      throw NonStarShapedFace("degenerate triangle in face triangulation");
    double h = std::max({(a - b).norm(), (b - c).norm(), (c - a).norm()});
    ft.tri_diameter.push_back(h);
  }
  return ft;
}

SkeletonMesh build_skeleton_mesh(const PolyMesh& mesh, int level,
                                 const CoefficientField& coeffs, const ShiftPolicy& shift) {
  SkeletonMesh skel;
  skel.level = level;
  skel.n_mesh_nodes = mesh.n_nodes();
  const int seg = 1 << level;

  // numbering: mesh nodes, then edge samples, then face interiors
  skel.aux_coords.reserve(mesh.nodes.size());
  for (const Vec3& p : mesh.nodes) skel.aux_coords.push_back(p);
  skel.aux_info.resize(mesh.nodes.size());
  for (Index i = 0; i < mesh.n_nodes(); ++i)
    skel.aux_info[i] = {AuxInfo::Kind::MeshNode, i, 0};

  skel.edge_base.resize(mesh.n_edges());
  for (Index e = 0; e < mesh.n_edges(); ++e) {
    skel.edge_base[e] = skel.n_aux();
    const Edge& ed = mesh.edges[e];
    const Vec3& p0 = mesh.nodes[ed.nodes[0]];
    const Vec3& p1 = mesh.nodes[ed.nodes[1]];
    for (int j = 1; j < seg; ++j) {
      skel.aux_coords.push_back(p0 + (double(j) / seg) * (p1 - p0));
      skel.aux_info.push_back({AuxInfo::Kind::EdgeSample, e, j});
    }
  }

  skel.faces.resize(mesh.n_faces());
  for (Index f = 0; f < mesh.n_faces(); ++f) {
    SkeletonFace& sf = skel.faces[f];
    sf.frame = face_frame(mesh, f);
    std::vector<Vec2> poly = face_polygon(mesh, f, sf.frame);
    const FaceCoeffs& fc = coeffs.face[f];
    try {
      sf.tri = build_face_triangulation(poly, level, fc.b, fc.alpha, shift);
    } catch (const NonStarShapedFace& err) {
      throw NonStarShapedFace("face " + std::to_string(f) + ": " + err.what());
    }

    const Face& face = mesh.faces[f];
    const int n = sf.tri.n_loop;
    sf.global_ids.assign(sf.tri.vertices.size(), kInvalidIndex);
    for (int k = 0; k < n; ++k) {
      for (int j = 0; j < seg; ++j) {
        const int bv = sf.tri.boundary_vertex(k, j);
        if (j == 0) {
          sf.global_ids[bv] = face.loop[k];
        } else {
          const Index eid = face.edges[k];
          const bool forward = mesh.edges[eid].nodes[0] == face.loop[k];
          const int sample = forward ? j : seg - j;
          sf.global_ids[bv] = skel.edge_sample_id(eid, sample);
        }
      }
    }
    for (size_t v = sf.tri.n_boundary; v < sf.tri.vertices.size(); ++v) {
      sf.global_ids[v] = skel.n_aux();
      skel.aux_coords.push_back(sf.frame.to_global(
          Vec3(sf.tri.vertices[v].x(), sf.tri.vertices[v].y(), 0.0)));
      skel.aux_info.push_back({AuxInfo::Kind::FaceInterior, f,
                               static_cast<int>(v) - sf.tri.n_boundary});
    }
  }

  skel.aux_dirichlet.assign(skel.aux_coords.size(), false);
  for (Index i = 0; i < mesh.n_nodes(); ++i) skel.aux_dirichlet[i] = mesh.node_boundary[i];
  for (Index e = 0; e < mesh.n_edges(); ++e)
    if (mesh.edges[e].boundary)
      for (int j = 1; j < seg; ++j) skel.aux_dirichlet[skel.edge_sample_id(e, j)] = true;
  for (Index f = 0; f < mesh.n_faces(); ++f)
    if (mesh.faces[f].boundary)
      for (size_t v = skel.faces[f].tri.n_boundary; v < skel.faces[f].tri.vertices.size(); ++v)
        skel.aux_dirichlet[skel.faces[f].global_ids[v]] = true;

  return skel;
}

ElementSurface element_surface(const PolyMesh& mesh, const SkeletonMesh& skel, Index element) {
  ElementSurface surf;
  const Element& el = mesh.elements[element];
  std::map<Index, int> local;
  auto local_id = [&](Index gid) {
    auto [it, inserted] = local.try_emplace(gid, static_cast<int>(surf.gids.size()));
    if (inserted) {
      surf.gids.push_back(gid);
      surf.pos.push_back(skel.aux_coords[gid]);
    }
    return it->second;
  };
  for (size_t k = 0; k < el.faces.size(); ++k) {
    const SkeletonFace& sf = skel.faces[el.faces[k]];
    const bool flip = el.face_signs[k] < 0;
    for (const auto& t : sf.tri.triangles) {
      int a = local_id(sf.global_ids[t[0]]);
      int b = local_id(sf.global_ids[t[1]]);
      int c = local_id(sf.global_ids[t[2]]);
      if (flip) std::swap(b, c);
      surf.tris.push_back({a, b, c});
      surf.tri_face.push_back(el.faces[k]);
    }
  }
  return surf;
}

} // namespace cabem
