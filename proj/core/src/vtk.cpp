#include "cabem/harness.hpp"

#include "cabem/errors.hpp"

#include <cstdio>
#include <fstream>
#include <string>

namespace cabem {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_grid(std::ofstream& out, const SkeletonMesh& skel) {
  out << "# vtk DataFile Version 3.0\n";
  out << "skeleton triangulation level " << skel.level << "\n";
  out << "ASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << skel.n_aux() << " double\n";
  for (const Vec3& p : skel.aux_coords)
    out << fmt(p.x()) << ' ' << fmt(p.y()) << ' ' << fmt(p.z()) << '\n';
  size_t ntri = 0;
  for (const auto& sf : skel.faces) ntri += sf.tri.triangles.size();
  out << "CELLS " << ntri << ' ' << 4 * ntri << '\n';
  for (const auto& sf : skel.faces)
    for (const auto& t : sf.tri.triangles)
      out << "3 " << sf.global_ids[t[0]] << ' ' << sf.global_ids[t[1]] << ' '
          << sf.global_ids[t[2]] << '\n';
  out << "CELL_TYPES " << ntri << '\n';
  for (size_t i = 0; i < ntri; ++i) out << "5\n";
}

} // namespace

void export_vtk(const SkeletalSolution& sol, const SkeletonMesh& skel, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  write_grid(out, skel);
  out << "POINT_DATA " << skel.n_aux() << '\n';
  out << "SCALARS u double 1\nLOOKUP_TABLE default\n";
  for (Index i = 0; i < skel.n_aux(); ++i) out << fmt(sol.aux_values(i)) << '\n';
}

void export_skeleton_vtk(const SkeletonMesh& skel, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  write_grid(out, skel);
  out << "POINT_DATA " << skel.n_aux() << '\n';
  out << "SCALARS dirichlet int 1\nLOOKUP_TABLE default\n";
  for (Index i = 0; i < skel.n_aux(); ++i) out << (skel.aux_dirichlet[i] ? 1 : 0) << '\n';
}

void export_basis_vtk(const PolyMesh& mesh, const SkeletonMesh& skel, const BasisTraces& traces,
                      Index face, Index node, const std::string& path) {
  const SkeletonFace& sf = skel.faces[face];
  const Face& f = mesh.faces[face];
  int corner = -1;
  for (size_t k = 0; k < f.loop.size(); ++k)
    if (f.loop[k] == node) corner = static_cast<int>(k);
  if (corner < 0)
    throw InconsistentDimensions("node " + std::to_string(node) + " not on face " +
                                 std::to_string(face));
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << "# vtk DataFile Version 3.0\n";
  out << "basis trace of node " << node << " on face " << face << "\n";
  out << "ASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << sf.tri.vertices.size() << " double\n";
  for (const auto& v : sf.tri.vertices) {
    Vec3 p = sf.frame.to_global(Vec3(v.x(), v.y(), 0.0));
    out << fmt(p.x()) << ' ' << fmt(p.y()) << ' ' << fmt(p.z()) << '\n';
  }
  out << "CELLS " << sf.tri.triangles.size() << ' ' << 4 * sf.tri.triangles.size() << '\n';
  for (const auto& t : sf.tri.triangles)
    out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  out << "CELL_TYPES " << sf.tri.triangles.size() << '\n';
  for (size_t i = 0; i < sf.tri.triangles.size(); ++i) out << "5\n";
  out << "POINT_DATA " << sf.tri.vertices.size() << '\n';
  out << "SCALARS phi double 1\nLOOKUP_TABLE default\n";
  const VecX& vals = traces.face[face].basis[corner];
  for (long i = 0; i < vals.size(); ++i) out << fmt(vals(i)) << '\n';
}

} // namespace cabem
