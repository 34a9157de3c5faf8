#pragma once

#include "cabem/types.hpp"

#include <array>
#include <string>
#include <vector>

namespace cabem {

/// Rigid motion x = rotation * local + offset. Columns of `rotation` are the
/// local axes expressed in global coordinates (right-handed, orthonormal).
struct RigidFrame {
  Mat3 rotation = Mat3::Identity();
  Vec3 offset = Vec3::Zero();

  Vec3 to_global(const Vec3& local) const { return rotation * local + offset; }
  Vec3 to_local(const Vec3& global) const { return rotation.transpose() * (global - offset); }
};

struct Edge {
  std::array<Index, 2> nodes{kInvalidIndex, kInvalidIndex}; // nodes[0] < nodes[1]
  double length = 0.0;
  bool boundary = false;
  std::vector<Index> faces; // incident faces
};

struct Face {
  std::vector<Index> loop;   // node ids, counterclockwise w.r.t. `normal`
  std::vector<Index> edges;  // edges[k] joins loop[k] and loop[k+1 mod n]
  Vec3 normal = Vec3::Zero();
  Vec3 centroid = Vec3::Zero();
  double area = 0.0;
  double diameter = 0.0;
  std::array<Index, 2> elements{kInvalidIndex, kInvalidIndex};
  bool boundary = false;
};

struct Element {
  std::vector<Index> faces;
  std::vector<int> face_signs; // +1 if stored face normal points outward
  std::vector<Index> nodes;    // unique node ids, ascending
  std::vector<Index> edges;    // unique edge ids, ascending
  Vec3 centroid = Vec3::Zero();
  double diameter = 0.0; // h_T
};

struct PolyMesh {
  std::vector<Vec3> nodes;
  std::vector<Edge> edges;
  std::vector<Face> faces;
  std::vector<Element> elements;
  std::vector<bool> node_boundary;

  Index n_nodes() const { return static_cast<Index>(nodes.size()); }
  Index n_edges() const { return static_cast<Index>(edges.size()); }
  Index n_faces() const { return static_cast<Index>(faces.size()); }
  Index n_elements() const { return static_cast<Index>(elements.size()); }
  double h_max() const;
};

/// Assembles edges, adjacency, normals, boundary flags and element metrics
/// from nodes + face loops + element (face, sign) lists. Face signs may be
/// passed as 0 to have the outward direction determined geometrically.
PolyMesh build_poly_mesh(std::vector<Vec3> nodes,
                         std::vector<std::vector<Index>> face_loops,
                         std::vector<std::vector<std::pair<Index, int>>> element_faces);

/// Structured tetrahedral mesh of (0,1)^3: n^3 sub-cubes, each split into six
/// tetrahedra around a main diagonal. The split is mirrored by sub-cube
/// parity so that shared walls match and translated copies fall into a small
/// number of congruence classes.
PolyMesh build_unit_cube_tet_mesh(int n);

/// A conforming polygonal tiling of the unit square, used as the cross
/// section of a prism mesh.
struct Tiling {
  std::vector<Vec2> nodes;
  std::vector<std::vector<Index>> polygons; // ccw loops
};

/// Hexagon tiling of the unit square, clipped at the boundary. `rows` controls
/// resolution; the preset used by the experiments is hex_tiling(9).
Tiling hex_tiling(int rows);

/// Extrudes a tiling of the unit square (x1-x3 plane) into `layers` equal
/// slabs along x2. Throws NonStarShapedFace if a polygon fails the star test.
PolyMesh build_prism_mesh(const Tiling& tiling, int layers);

/// The prism mesh used by the second experiment: clipped hexagon ends,
/// four layers, h_max around 0.28.
PolyMesh paper_like_prism_mesh();

struct ValidationCheck {
  std::string name;
  bool pass = true;
  Index worst_entity = kInvalidIndex;
  double worst_value = 0.0;
  std::string detail;
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;
  bool ok = true;
  std::string summary() const;
};

/// Pure function; failures are report entries, never exceptions.
ValidationReport validate(const PolyMesh& mesh);

/// Face frame: e3 = face normal, face lies in the local (e1,e2) plane with
/// loop[0] at the origin. Throws DegenerateEntity for area < 1e-14.
RigidFrame face_frame(const PolyMesh& mesh, Index face);

/// Edge frame: the edge lies on the local e1 axis, the endpoint with the
/// smaller global node index at the origin and the other at (|E|,0,0).
/// Throws DegenerateEntity for length < 1e-14.
RigidFrame edge_frame(const PolyMesh& mesh, Index edge);

/// In-frame 2D loop coordinates of a face (counterclockwise).
std::vector<Vec2> face_polygon(const PolyMesh& mesh, Index face, const RigidFrame& frame);

PolyMesh load_mesh_json(const std::string& path);
void save_mesh_json(const PolyMesh& mesh, const std::string& path);

} // namespace cabem
