#include "cabem/mesh.hpp"

#include "cabem/errors.hpp"
#include "cabem/geometry2d.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

namespace cabem {

namespace {

Vec3 newell_normal(const std::vector<Vec3>& pts, const std::vector<Index>& loop) {
  Vec3 n = Vec3::Zero();
  const size_t m = loop.size();
  for (size_t i = 0; i < m; ++i) {
    const Vec3& a = pts[loop[i]];
    const Vec3& b = pts[loop[(i + 1) % m]];
    n.x() += (a.y() - b.y()) * (a.z() + b.z());
    n.y() += (a.z() - b.z()) * (a.x() + b.x());
    n.z() += (a.x() - b.x()) * (a.y() + b.y());
  }
  return n;
}

double loop_diameter(const std::vector<Vec3>& pts, const std::vector<Index>& loop) {
  double d = 0.0;
  for (size_t i = 0; i < loop.size(); ++i)
    for (size_t j = i + 1; j < loop.size(); ++j)
      d = std::max(d, (pts[loop[i]] - pts[loop[j]]).norm());
  return d;
}

Vec3 loop_centroid(const std::vector<Vec3>& pts, const std::vector<Index>& loop) {
  // area-weighted centroid of the (planar) polygon via a fan about the mean
  Vec3 mean = Vec3::Zero();
  for (Index id : loop) mean += pts[id];
  mean /= static_cast<double>(loop.size());
  Vec3 c = Vec3::Zero();
  double area2 = 0.0;
  const size_t m = loop.size();
  for (size_t i = 0; i < m; ++i) {
    const Vec3& a = pts[loop[i]];
    const Vec3& b = pts[loop[(i + 1) % m]];
    double w = ((a - mean).cross(b - mean)).norm();
    area2 += w;
    c += w / 3.0 * (a + b + mean);
  }
  return area2 > 0 ? Vec3(c / area2) : mean;
}

} // namespace

double PolyMesh::h_max() const {
  double h = 0.0;
  for (const auto& e : elements) h = std::max(h, e.diameter);
  return h;
}

PolyMesh build_poly_mesh(std::vector<Vec3> nodes,
                         std::vector<std::vector<Index>> face_loops,
                         std::vector<std::vector<std::pair<Index, int>>> element_faces) {
  PolyMesh mesh;
  mesh.nodes = std::move(nodes);

  std::map<std::array<Index, 2>, Index> edge_ids;
  mesh.faces.resize(face_loops.size());
  for (size_t f = 0; f < face_loops.size(); ++f) {
    Face& face = mesh.faces[f];
    face.loop = std::move(face_loops[f]);
    const size_t m = face.loop.size();
    if (m < 3) throw InconsistentDimensions("face " + std::to_string(f) + " has fewer than 3 nodes");
    Vec3 n = newell_normal(mesh.nodes, face.loop);
    face.area = 0.5 * n.norm();
    if (face.area < 1e-14)
      throw DegenerateEntity("face " + std::to_string(f) + " has vanishing area");
    face.normal = n.normalized();
    face.centroid = loop_centroid(mesh.nodes, face.loop);
    face.diameter = loop_diameter(mesh.nodes, face.loop);
    face.edges.resize(m);
    for (size_t k = 0; k < m; ++k) {
      Index a = face.loop[k], b = face.loop[(k + 1) % m];
      std::array<Index, 2> key{std::min(a, b), std::max(a, b)};
      auto [it, inserted] = edge_ids.try_emplace(key, static_cast<Index>(mesh.edges.size()));
      if (inserted) {
        Edge e;
        e.nodes = key;
        e.length = (mesh.nodes[a] - mesh.nodes[b]).norm();
        mesh.edges.push_back(e);
      }
      face.edges[k] = it->second;
      mesh.edges[it->second].faces.push_back(static_cast<Index>(f));
    }
  }

  mesh.elements.resize(element_faces.size());
  for (size_t e = 0; e < element_faces.size(); ++e) {
    Element& el = mesh.elements[e];
    std::set<Index> nset, eset;
    for (auto& [fid, sign] : element_faces[e]) {
      el.faces.push_back(fid);
      el.face_signs.push_back(sign);
      for (Index nd : mesh.faces[fid].loop) nset.insert(nd);
      for (Index ed : mesh.faces[fid].edges) eset.insert(ed);
    }
    el.nodes.assign(nset.begin(), nset.end());
    el.edges.assign(eset.begin(), eset.end());
    el.centroid = Vec3::Zero();
    for (Index nd : el.nodes) el.centroid += mesh.nodes[nd];
    el.centroid /= static_cast<double>(el.nodes.size());
    el.diameter = 0.0;
    for (size_t i = 0; i < el.nodes.size(); ++i)
      for (size_t j = i + 1; j < el.nodes.size(); ++j)
        el.diameter = std::max(el.diameter,
                               (mesh.nodes[el.nodes[i]] - mesh.nodes[el.nodes[j]]).norm());
    for (size_t k = 0; k < el.faces.size(); ++k) {
      Face& face = mesh.faces[el.faces[k]];
      if (el.face_signs[k] == 0) {
        double s = face.normal.dot(face.centroid - el.centroid);
        el.face_signs[k] = s >= 0 ? 1 : -1;
      }
      if (face.elements[0] == kInvalidIndex) face.elements[0] = static_cast<Index>(e);
      else if (face.elements[1] == kInvalidIndex) face.elements[1] = static_cast<Index>(e);
      else throw InconsistentDimensions("face " + std::to_string(el.faces[k]) +
                                        " incident to more than two elements");
    }
  }

  mesh.node_boundary.assign(mesh.nodes.size(), false);
  for (auto& face : mesh.faces) {
    face.boundary = face.elements[1] == kInvalidIndex;
    if (face.boundary) {
      for (Index nd : face.loop) mesh.node_boundary[nd] = true;
      for (Index ed : face.edges) mesh.edges[ed].boundary = true;
    }
  }
  return mesh;
}

// ---------------------------------------------------------------------------
// generators

PolyMesh build_unit_cube_tet_mesh(int n) {
  if (n < 1) throw InconsistentDimensions("cube mesh requires n >= 1");
  const int np = n + 1;
  auto node_id = [&](int i, int j, int k) { return static_cast<Index>(i + np * (j + np * k)); };

  std::vector<Vec3> nodes(static_cast<size_t>(np) * np * np);
  for (int k = 0; k < np; ++k)
    for (int j = 0; j < np; ++j)
      for (int i = 0; i < np; ++i)
        nodes[node_id(i, j, k)] =
            Vec3(double(i) / n, double(j) / n, double(k) / n);

  // Kuhn split: six tetrahedra per sub-cube along a main diagonal. The local
  // corner map is mirrored by sub-cube parity so walls of neighboring cubes
  // carry matching triangles and congruent copies repeat under translation.
  static const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                  {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};

  std::map<std::array<Index, 3>, Index> face_ids;
  std::vector<std::vector<Index>> face_loops;
  std::vector<std::vector<std::pair<Index, int>>> element_faces;

  auto add_tet = [&](std::array<Index, 4> v) {
    Vec3 a = nodes[v[1]] - nodes[v[0]];
    Vec3 b = nodes[v[2]] - nodes[v[0]];
    Vec3 c = nodes[v[3]] - nodes[v[0]];
    if (a.cross(b).dot(c) < 0) std::swap(v[1], v[2]);
    static const int tet_faces[4][3] = {{0, 2, 1}, {0, 1, 3}, {0, 3, 2}, {1, 2, 3}};
    std::vector<std::pair<Index, int>> efaces;
    for (auto& tf : tet_faces) {
      std::array<Index, 3> tri{v[tf[0]], v[tf[1]], v[tf[2]]};
      std::array<Index, 3> key = tri;
      std::sort(key.begin(), key.end());
      auto [it, inserted] = face_ids.try_emplace(key, static_cast<Index>(face_loops.size()));
      if (inserted) {
        face_loops.push_back({tri[0], tri[1], tri[2]});
        efaces.emplace_back(it->second, 1);
      } else {
        efaces.emplace_back(it->second, -1);
      }
    }
    element_faces.push_back(std::move(efaces));
  };

  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const int rx = i & 1, ry = j & 1, rz = k & 1;
        auto corner = [&](int dx, int dy, int dz) {
          return node_id(i + (rx ? 1 - dx : dx), j + (ry ? 1 - dy : dy),
                         k + (rz ? 1 - dz : dz));
        };
        for (auto& p : perms) {
          int d[3] = {0, 0, 0};
          std::array<Index, 4> v;
          v[0] = corner(d[0], d[1], d[2]);
          d[p[0]] = 1;
          v[1] = corner(d[0], d[1], d[2]);
          d[p[1]] = 1;
          v[2] = corner(d[0], d[1], d[2]);
          d[p[2]] = 1;
          v[3] = corner(d[0], d[1], d[2]);
          add_tet(v);
        }
      }

  return build_poly_mesh(std::move(nodes), std::move(face_loops), std::move(element_faces));
}

Tiling hex_tiling(int rows) {
  if (rows < 1) throw InconsistentDimensions("hex tiling requires rows >= 1");
  // pointy-top hexagons, odd rows offset by half a width; lattice shifted by
  // a small fixed amount so no hexagon edge degenerates against the square
  const double s = 1.0 / (1.5 * rows + 0.5);
  const double w = std::sqrt(3.0) * s;
  const Vec2 shift(0.01371, 0.00779);

  std::map<std::array<long long, 2>, Index> node_ids;
  Tiling tiling;
  auto get_node = [&](const Vec2& p) {
    std::array<long long, 2> key{llround(p.x() * 1e9), llround(p.y() * 1e9)};
    auto [it, inserted] = node_ids.try_emplace(key, static_cast<Index>(tiling.nodes.size()));
    if (inserted) tiling.nodes.push_back(Vec2(key[0] * 1e-9, key[1] * 1e-9));
    return it->second;
  };

  const int cols = static_cast<int>(std::ceil(1.0 / w)) + 2;
  for (int r = -1; r <= rows + 1; ++r) {
    for (int c = -1; c <= cols; ++c) {
      Vec2 center(c * w + (r & 1 ? 0.5 * w : 0.0) + shift.x(), r * 1.5 * s + shift.y());
      std::vector<Vec2> hex;
      for (int k = 0; k < 6; ++k) {
        double ang = M_PI / 6.0 + k * M_PI / 3.0;
        hex.emplace_back(center.x() + s * std::cos(ang), center.y() + s * std::sin(ang));
      }
      std::vector<Vec2> cell = clip_to_box(hex, 0.0, 1.0, 0.0, 1.0);
      if (cell.size() < 3 || polygon_area(cell) < 1e-10) continue;
      std::vector<Index> loop;
      for (const Vec2& p : cell) {
        Index id = get_node(p);
        if (loop.empty() || loop.back() != id) loop.push_back(id);
      }
      while (loop.size() > 1 && loop.front() == loop.back()) loop.pop_back();
      if (loop.size() < 3) continue;
      tiling.polygons.push_back(std::move(loop));
    }
  }
  return tiling;
}

PolyMesh build_prism_mesh(const Tiling& tiling, int layers) {
  if (layers < 1) throw InconsistentDimensions("prism mesh requires layers >= 1");
  for (size_t p = 0; p < tiling.polygons.size(); ++p) {
    std::vector<Vec2> poly;
    for (Index id : tiling.polygons[p]) poly.push_back(tiling.nodes[id]);
    auto [center, radius] = chebyshev_center(poly);
    if (radius <= 0 || !fan_star_shaped(poly, center))
      throw NonStarShapedFace("tiling polygon " + std::to_string(p) + " is not star-shaped");
  }

  const Index nt = static_cast<Index>(tiling.nodes.size());
  std::vector<Vec3> nodes;
  nodes.reserve(static_cast<size_t>(nt) * (layers + 1));
  for (int l = 0; l <= layers; ++l)
    for (Index i = 0; i < nt; ++i)
      nodes.emplace_back(tiling.nodes[i].x(), double(l) / layers, tiling.nodes[i].y());
  auto lift = [&](Index tnode, int level) { return static_cast<Index>(level * nt + tnode); };

  std::map<std::vector<Index>, Index> face_ids;
  std::vector<std::vector<Index>> face_loops;
  std::vector<std::vector<std::pair<Index, int>>> element_faces;

  auto get_face = [&](std::vector<Index> loop) {
    std::vector<Index> key = loop;
    std::sort(key.begin(), key.end());
    auto [it, inserted] = face_ids.try_emplace(key, static_cast<Index>(face_loops.size()));
    int sign = inserted ? 1 : -1;
    if (inserted) face_loops.push_back(std::move(loop));
    return std::make_pair(it->second, sign);
  };

  for (int l = 0; l < layers; ++l) {
    for (const auto& poly : tiling.polygons) {
      std::vector<std::pair<Index, int>> efaces;
      std::vector<Index> bottom, top;
      for (Index tn : poly) bottom.push_back(lift(tn, l));
      for (Index tn : poly) top.push_back(lift(tn, l + 1));
      efaces.push_back({get_face(bottom).first, 0});
      efaces.push_back({get_face(top).first, 0});
      const size_t m = poly.size();
      for (size_t k = 0; k < m; ++k) {
        Index a = poly[k], b = poly[(k + 1) % m];
        std::vector<Index> quad{lift(a, l), lift(b, l), lift(b, l + 1), lift(a, l + 1)};
        efaces.push_back({get_face(std::move(quad)).first, 0});
      }
      element_faces.push_back(std::move(efaces));
    }
  }
  return build_poly_mesh(std::move(nodes), std::move(face_loops), std::move(element_faces));
}

PolyMesh paper_like_prism_mesh() { return build_prism_mesh(hex_tiling(8), 5); }

// ---------------------------------------------------------------------------
// validation

std::string ValidationReport::summary() const {
  std::ostringstream os;
  for (const auto& c : checks) {
    os << (c.pass ? "[pass] " : "[FAIL] ") << c.name;
    if (!c.pass) {
      os << " (entity " << c.worst_entity << ", value " << c.worst_value;
      if (!c.detail.empty()) os << ", " << c.detail;
      os << ")";
    }
    os << '\n';
  }
  return os.str();
}

ValidationReport validate(const PolyMesh& mesh) {
  ValidationReport report;
  auto push = [&](ValidationCheck c) {
    report.ok = report.ok && c.pass;
    report.checks.push_back(std::move(c));
  };

  { // planarity
    ValidationCheck c;
    c.name = "face-planarity";
    for (Index f = 0; f < mesh.n_faces(); ++f) {
      const Face& face = mesh.faces[f];
      double worst = 0.0;
      for (Index nd : face.loop)
        worst = std::max(worst, std::abs(face.normal.dot(mesh.nodes[nd] - face.centroid)));
      double rel = worst / std::max(face.diameter, 1e-300);
      if (rel > 1e-10 && (!c.pass ? rel > c.worst_value : true)) {
        c.pass = false;
        c.worst_entity = f;
        c.worst_value = rel;
        c.detail = "relative out-of-plane distance";
      }
    }
    push(std::move(c));
  }

  { // incidence counts
    ValidationCheck c;
    c.name = "face-incidence";
    for (Index f = 0; f < mesh.n_faces(); ++f) {
      int cnt = (mesh.faces[f].elements[0] != kInvalidIndex) +
                (mesh.faces[f].elements[1] != kInvalidIndex);
      if (cnt == 0) {
        c.pass = false;
        c.worst_entity = f;
        c.detail = "orphan face";
      }
    }
    push(std::move(c));
  }

  { // closed, orientable element surfaces
    ValidationCheck c;
    c.name = "element-surfaces-closed";
    for (Index e = 0; e < mesh.n_elements() && c.pass; ++e) {
      const Element& el = mesh.elements[e];
      std::map<std::array<Index, 2>, int> directed;
      for (size_t k = 0; k < el.faces.size(); ++k) {
        const Face& face = mesh.faces[el.faces[k]];
        const size_t m = face.loop.size();
        for (size_t i = 0; i < m; ++i) {
          Index a = face.loop[i], b = face.loop[(i + 1) % m];
          if (el.face_signs[k] < 0) std::swap(a, b);
          directed[{a, b}] += 1;
        }
      }
      for (auto& [key, cnt] : directed) {
        auto rev = directed.find({key[1], key[0]});
        if (cnt != 1 || rev == directed.end() || rev->second != 1) {
          c.pass = false;
          c.worst_entity = e;
          c.detail = "surface edge not matched by opposite orientation";
          break;
        }
      }
    }
    push(std::move(c));
  }

  { // outward normals (sign test against element centroid)
    ValidationCheck c;
    c.name = "outward-normals";
    for (Index e = 0; e < mesh.n_elements(); ++e) {
      const Element& el = mesh.elements[e];
      for (size_t k = 0; k < el.faces.size(); ++k) {
        const Face& face = mesh.faces[el.faces[k]];
        double s = el.face_signs[k] * face.normal.dot(face.centroid - el.centroid);
        if (s <= 0 && (c.pass || s < c.worst_value)) {
          c.pass = false;
          c.worst_entity = e;
          c.worst_value = s;
          c.detail = "face " + std::to_string(el.faces[k]) + " not outward";
        }
      }
    }
    push(std::move(c));
  }

  { // conformity: every face of an interior wall shared by exactly 2 elements
    // and no node lies on a face it does not belong to
    ValidationCheck c;
    c.name = "conforming-no-hanging-nodes";
    for (Index f = 0; f < mesh.n_faces() && c.pass; ++f) {
      const Face& face = mesh.faces[f];
      RigidFrame frame;
      frame.rotation.col(2) = face.normal;
      Vec3 e1 = (mesh.nodes[face.loop[1]] - mesh.nodes[face.loop[0]]).normalized();
      frame.rotation.col(0) = e1;
      frame.rotation.col(1) = face.normal.cross(e1);
      frame.offset = mesh.nodes[face.loop[0]];
      std::vector<Vec2> poly;
      for (Index nd : face.loop) {
        Vec3 q = frame.to_local(mesh.nodes[nd]);
        poly.emplace_back(q.x(), q.y());
      }
      const double tol = 1e-9 * face.diameter;
      for (Index nd = 0; nd < mesh.n_nodes(); ++nd) {
        if (std::find(face.loop.begin(), face.loop.end(), nd) != face.loop.end()) continue;
        Vec3 q = frame.to_local(mesh.nodes[nd]);
        if (std::abs(q.z()) > tol) continue;
        if (point_in_polygon(poly, Vec2(q.x(), q.y()), -1e-7 * face.diameter)) {
          c.pass = false;
          c.worst_entity = f;
          c.detail = "node " + std::to_string(nd) + " hangs on face";
          break;
        }
      }
    }
    push(std::move(c));
  }

  { // star-shaped faces
    ValidationCheck c;
    c.name = "star-shaped-faces";
    for (Index f = 0; f < mesh.n_faces(); ++f) {
      const Face& face = mesh.faces[f];
      RigidFrame frame = face_frame(mesh, f);
      std::vector<Vec2> poly = face_polygon(mesh, f, frame);
      auto [center, radius] = chebyshev_center(poly);
      bool ok = radius > 1e-12 * face.diameter && fan_star_shaped(poly, center);
      if (!ok && c.pass) {
        c.pass = false;
        c.worst_entity = f;
        c.worst_value = radius;
        c.detail = "chebyshev radius";
      }
    }
    push(std::move(c));
  }

  return report;
}

// ---------------------------------------------------------------------------
// frames

RigidFrame face_frame(const PolyMesh& mesh, Index face) {
  const Face& f = mesh.faces[face];
  if (f.area < 1e-14) throw DegenerateEntity("face " + std::to_string(face) + " degenerate");
  RigidFrame frame;
  Vec3 e1 = (mesh.nodes[f.loop[1]] - mesh.nodes[f.loop[0]]).normalized();
  frame.rotation.col(0) = e1;
  frame.rotation.col(1) = f.normal.cross(e1);
  frame.rotation.col(2) = f.normal;
  frame.offset = mesh.nodes[f.loop[0]];
  return frame;
}

RigidFrame edge_frame(const PolyMesh& mesh, Index edge) {
  const Edge& e = mesh.edges[edge];
  if (e.length < 1e-14) throw DegenerateEntity("edge " + std::to_string(edge) + " degenerate");
  RigidFrame frame;
  Vec3 e1 = (mesh.nodes[e.nodes[1]] - mesh.nodes[e.nodes[0]]) / e.length;
  int least = 0;
  for (int k = 1; k < 3; ++k)
    if (std::abs(e1[k]) < std::abs(e1[least])) least = k;
  Vec3 e2 = Vec3::Unit(least) - e1[least] * e1;
  e2.normalize();
  frame.rotation.col(0) = e1;
  frame.rotation.col(1) = e2;
  frame.rotation.col(2) = e1.cross(e2);
  frame.offset = mesh.nodes[e.nodes[0]];
  return frame;
}

std::vector<Vec2> face_polygon(const PolyMesh& mesh, Index face, const RigidFrame& frame) {
  std::vector<Vec2> poly;
  poly.reserve(mesh.faces[face].loop.size());
  for (Index nd : mesh.faces[face].loop) {
    Vec3 q = frame.to_local(mesh.nodes[nd]);
    poly.emplace_back(q.x(), q.y());
  }
  return poly;
}

// ---------------------------------------------------------------------------
// JSON I/O

PolyMesh load_mesh_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open mesh file " + path);
  nlohmann::json j;
  in >> j;
  std::vector<Vec3> nodes;
  for (auto& n : j.at("nodes"))
    nodes.emplace_back(n.at(0).get<double>(), n.at(1).get<double>(), n.at(2).get<double>());
  std::vector<std::vector<Index>> loops;
  for (auto& f : j.at("faces")) loops.push_back(f.get<std::vector<Index>>());
  std::vector<std::vector<std::pair<Index, int>>> elems;
  for (auto& e : j.at("elements")) {
    std::vector<std::pair<Index, int>> ef;
    for (auto& fs : e) ef.emplace_back(fs.at(0).get<Index>(), fs.at(1).get<int>());
    elems.push_back(std::move(ef));
  }
  return build_poly_mesh(std::move(nodes), std::move(loops), std::move(elems));
}

void save_mesh_json(const PolyMesh& mesh, const std::string& path) {
  nlohmann::json j;
  for (const Vec3& n : mesh.nodes) j["nodes"].push_back({n.x(), n.y(), n.z()});
  for (const Face& f : mesh.faces) j["faces"].push_back(f.loop);
  for (const Element& e : mesh.elements) {
    nlohmann::json ef = nlohmann::json::array();
    for (size_t k = 0; k < e.faces.size(); ++k)
      ef.push_back({e.faces[k], e.face_signs[k]});
    j["elements"].push_back(std::move(ef));
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot write mesh file " + path);
  out << j.dump(1) << '\n';
}

} // namespace cabem
