#pragma once

#include "cabem/coeffs.hpp"
#include "cabem/mesh.hpp"
#include "cabem/types.hpp"

#include <array>
#include <vector>

namespace cabem {

/// Triangulation of one polygonal face in its 2D frame. Level 0 is the fan
/// about the (possibly convection-shifted) Chebyshev center; each further
/// level splits every triangle into four via edge midpoints. Vertices are
/// ordered boundary-first: the n*2^level boundary vertices in loop order
/// (corner 0, its edge samples, corner 1, ...), then interior vertices.
struct FaceTriangulation {
  int level = 0;
  int n_loop = 0;     // polygon corner count
  int n_boundary = 0; // n_loop * 2^level
  std::vector<Vec2> vertices;
  std::vector<std::array<int, 3>> triangles; // ccw
  std::vector<double> tri_diameter;
  Vec2 center = Vec2::Zero();
  double beta_used = 0.0; // shift fraction actually applied

  int nodes_per_edge() const { return (1 << level) + 1; }
  /// Boundary vertex index for sample j of loop edge k (j in [0, 2^level]).
  int boundary_vertex(int k, int j) const {
    const int seg = 1 << level;
    return (k * seg + j) % n_boundary;
  }
};

struct ShiftPolicy {
  bool enabled = true;
  double beta = 0.5;
  double peclet_threshold = 2.0;
};

/// Builds the fan triangulation of a star-shaped polygon. If the face Peclet
/// number diam(F) |b_F| / alpha_F exceeds the threshold, the level-0 center
/// moves from the Chebyshev center along b_F by beta times the distance to
/// the boundary in that direction, halving beta while the fan would become
/// invalid. Throws NonStarShapedFace if no valid center exists at beta = 0.
FaceTriangulation build_face_triangulation(const std::vector<Vec2>& polygon, int level,
                                           const Vec2& b_F, double alpha_F,
                                           const ShiftPolicy& shift);

/// Classification of a global auxiliary node.
struct AuxInfo {
  enum class Kind { MeshNode, EdgeSample, FaceInterior };
  Kind kind = Kind::MeshNode;
  Index owner = kInvalidIndex; // node / edge / face id
  int index = 0;               // sample index along edge (1..2^l-1) or interior offset
};

struct SkeletonFace {
  FaceTriangulation tri;
  RigidFrame frame;
  std::vector<Index> global_ids; // per triangulation vertex
};

/// Conforming triangulation of the whole skeleton. Auxiliary node numbering:
/// mesh nodes first (same ids as the mesh), then per-edge samples in
/// canonical edge order, then per-face interior vertices.
struct SkeletonMesh {
  int level = 0;
  std::vector<SkeletonFace> faces;
  std::vector<Vec3> aux_coords;
  std::vector<AuxInfo> aux_info;
  std::vector<bool> aux_dirichlet;
  std::vector<Index> edge_base; // first sample id of each mesh edge
  Index n_mesh_nodes = 0;

  Index n_aux() const { return static_cast<Index>(aux_coords.size()); }
  Index edge_sample_id(Index edge, int j) const { return edge_base[edge] + j - 1; }
};

SkeletonMesh build_skeleton_mesh(const PolyMesh& mesh, int level,
                                 const CoefficientField& coeffs, const ShiftPolicy& shift);

/// Closed surface triangulation of one element, vertices in global auxiliary
/// ids with first-appearance local numbering, triangles oriented outward.
struct ElementSurface {
  std::vector<Index> gids;
  std::vector<Vec3> pos;
  std::vector<std::array<int, 3>> tris;
  std::vector<Index> tri_face; // mesh face each triangle came from
};

ElementSurface element_surface(const PolyMesh& mesh, const SkeletonMesh& skel, Index element);

} // namespace cabem
