#include "cabem/trace.hpp"

#include "cabem/errors.hpp"
#include "cabem/gmres.hpp"

#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <unordered_map>

namespace cabem {

// ---------------------------------------------------------------------------
// edge problems

double EdgeTrace::eval(double x) const {
  if (double_root) return (c1 + c2 * x) * std::exp(mu * (x - s1));
  return c1 * std::exp(l1 * (x - s1)) + c2 * std::exp(l2 * (x - s2));
}

double EdgeTrace::deriv(double x) const {
  if (double_root)
    return (c2 + mu * (c1 + c2 * x)) * std::exp(mu * (x - s1));
  return c1 * l1 * std::exp(l1 * (x - s1)) + c2 * l2 * std::exp(l2 * (x - s2));
}

double EdgeTrace::deriv2(double x) const {
  if (double_root)
    return (2.0 * mu * c2 + mu * mu * (c1 + c2 * x)) * std::exp(mu * (x - s1));
  return c1 * l1 * l1 * std::exp(l1 * (x - s1)) + c2 * l2 * l2 * std::exp(l2 * (x - s2));
}

double EdgeTrace::residual(double x) const {
  double r = -a * deriv2(x) + b * deriv(x) + c * eval(x);
  double scale = std::abs(a * deriv2(x)) + std::abs(b * deriv(x)) + std::abs(c * eval(x));
  return scale > 0 ? r / scale : r;
}

EdgeTrace edge_solve(double a, double b, double c, double L, double u0, double uL) {
  if (L <= 0) throw DegenerateEdge("edge length must be positive");
  if (a <= 0 || c < 0) throw BadCoefficients("edge problem needs a > 0, c >= 0");

  EdgeTrace t;
  t.a = a; t.b = b; t.c = c; t.length = L;
  const double disc = b * b + 4.0 * a * c;
  const double sq = std::sqrt(std::max(0.0, disc));
  const double lp = (b + sq) / (2.0 * a); // >= 0 for c >= 0
  const double lm = (b - sq) / (2.0 * a); // <= 0

  if ((lp - lm) * L < 1e-9) {
    // (nearly) coincident roots, includes the pure Laplace case b = c = 0
    t.double_root = true;
    t.mu = b / (2.0 * a);
    t.s1 = t.mu > 0 ? L : 0.0;
    const double e0 = std::exp(t.mu * (0.0 - t.s1));
    const double eL = std::exp(t.mu * (L - t.s1));
    // [e0, 0; eL, L eL] [c1; c2] = [u0; uL]
    t.c1 = u0 / e0;
    t.c2 = (uL / eL - t.c1) / L;
    return t;
  }

  t.l1 = lp; t.l2 = lm;
  t.s1 = lp > 0 ? L : 0.0;
  t.s2 = lm > 0 ? L : 0.0; // lm <= 0, so s2 = 0
  const double a11 = std::exp(lp * (0.0 - t.s1)), a12 = std::exp(lm * (0.0 - t.s2));
  const double a21 = std::exp(lp * (L - t.s1)), a22 = std::exp(lm * (L - t.s2));
  const double det = a11 * a22 - a12 * a21;
  t.c1 = (u0 * a22 - a12 * uL) / det;
  t.c2 = (a11 * uL - u0 * a21) / det;
  return t;
}

std::vector<double> edge_solve_at(double a, double b, double c, double L, double u0,
                                  double uL, std::span<const double> xs) {
  EdgeTrace t = edge_solve(a, b, c, L, u0, uL);
  std::vector<double> out;
  out.reserve(xs.size());
  for (double x : xs) {
    if (x < 0 || x > L) throw BadCoefficients("sample point outside [0, L]");
    out.push_back(t.eval(x));
  }
  return out;
}

// ---------------------------------------------------------------------------
// face problems

std::vector<double> supg_deltas(const FaceTriangulation& tri, const FaceCoeffs& fc) {
  std::vector<double> d;
  d.reserve(tri.triangles.size());
  const double bnorm = fc.b.norm();
  for (double h : tri.tri_diameter) d.push_back(supg_delta(h, bnorm, fc.alpha));
  return d;
}

VecX face_supg_solve(const FaceTriangulation& tri, const FaceCoeffs& fc,
                     std::span<const double> deltas, std::span<const double> boundary_values,
                     const FaceSolverOptions& opts) {
  const int nv = static_cast<int>(tri.vertices.size());
  const int nb = tri.n_boundary;
  const int ni = nv - nb;
  if (static_cast<int>(boundary_values.size()) != nb)
    throw InconsistentDimensions("boundary value count does not match triangulation");
  if (deltas.size() != tri.triangles.size())
    throw InconsistentDimensions("delta count does not match triangle count");

  VecX values = VecX::Zero(nv);
  for (int i = 0; i < nb; ++i) values(i) = boundary_values[i];
  if (ni == 0) return values;

  // interior unknowns are vertices nb..nv-1
  std::vector<Eigen::Triplet<double>> trips;
  VecX rhs = VecX::Zero(ni);
  for (size_t k = 0; k < tri.triangles.size(); ++k) {
    const auto& t = tri.triangles[k];
    const Vec2 &p0 = tri.vertices[t[0]], &p1 = tri.vertices[t[1]], &p2 = tri.vertices[t[2]];
    Mat2 M;
    M.col(0) = p1 - p0;
    M.col(1) = p2 - p0;
    const double area = 0.5 * M.determinant();
    Mat2 Minv = M.inverse();
    std::array<Vec2, 3> grad;
    grad[1] = Minv.transpose().col(0);
    grad[2] = Minv.transpose().col(1);
    grad[0] = -grad[1] - grad[2];
    std::array<double, 3> bg; // b . grad phi
    for (int i = 0; i < 3; ++i) bg[i] = fc.b.dot(grad[i]);
    const double delta = deltas[k];
    for (int i = 0; i < 3; ++i) {   // test
      for (int j = 0; j < 3; ++j) { // trial
        double v = area * grad[i].dot(fc.A * grad[j]);           // diffusion
        v += bg[j] * area / 3.0;                                  // convection
        v += fc.c * area * (i == j ? 1.0 / 6.0 : 1.0 / 12.0);     // reaction
        if (delta > 0) {
          v += delta * (bg[j] * bg[i] * area + fc.c * bg[i] * area / 3.0);
        }
        const int gi = t[i], gj = t[j];
        if (gi < nb) continue; // test functions vanish on the face boundary
        if (gj < nb) rhs(gi - nb) -= v * values(gj);
        else trips.emplace_back(gi - nb, gj - nb, v);
      }
    }
  }

  Eigen::SparseMatrix<double> A(ni, ni);
  A.setFromTriplets(trips.begin(), trips.end());

  VecX sol;
  if (ni < opts.dense_cutoff) {
    MatX Ad = MatX(A);
    Eigen::PartialPivLU<MatX> lu(Ad);
    sol = lu.solve(rhs);
  } else {
    try {
      auto op = [&](const VecX& v) { return VecX(A * v); };
      GmresResult r = gmres(ni, op, IdentityPrecond{}, rhs, opts.gmres_tol);
      sol = r.x;
    } catch (const NoConvergence& e) {
      throw SolverStagnation(std::string("face solve: ") + e.what());
    }
  }
  values.tail(ni) = sol;
  return values;
}

// ---------------------------------------------------------------------------
// basis traces

namespace {

constexpr double kQuant = 1e12;

struct KeyBuilder {
  std::vector<long long> data;
  void add(double v) { data.push_back(llround(v * kQuant)); }
  void add_int(long long v) { data.push_back(v); }
  bool operator<(const KeyBuilder&) const = delete;
};

struct KeyHash {
  size_t operator()(const std::vector<long long>& v) const {
    size_t h = 1469598103934665603ull;
    for (long long x : v) {
      h ^= static_cast<size_t>(x) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return h;
  }
};

using KeyMap = std::unordered_map<std::vector<long long>, int, KeyHash>;

} // namespace

BasisTraces build_basis_traces(const PolyMesh& mesh, const SkeletonMesh& skel,
                               const CoefficientField& coeffs, TraceMode mode,
                               bool use_lookup) {
  BasisTraces out;
  out.mode = mode;
  out.stats.enabled = use_lookup;
  const int seg = 1 << skel.level;
  const bool linear = mode == TraceMode::linear;

  // edge traces
  out.edge.resize(mesh.n_edges());
  std::vector<double> xs;
  for (int j = 1; j < seg; ++j) xs.push_back(double(j) / seg);

  KeyMap edge_classes;
  std::vector<std::array<EdgeTrace, 2>> edge_reps;
  for (Index e = 0; e < mesh.n_edges(); ++e) {
    const double L = mesh.edges[e].length;
    const EdgeCoeffs ec = linear ? EdgeCoeffs{1.0, 0.0, 0.0} : coeffs.edge[e];
    int cls = -1;
    if (use_lookup) {
      KeyBuilder kb;
      kb.add(L); kb.add(ec.a); kb.add(ec.b); kb.add(ec.c);
      auto [it, inserted] = edge_classes.try_emplace(std::move(kb.data),
                                                     static_cast<int>(edge_reps.size()));
      cls = it->second;
      if (!inserted) {
        out.edge[e] = edge_reps[cls];
        continue;
      }
    }
    std::array<EdgeTrace, 2> pair;
    pair[0] = edge_solve(ec.a, ec.b, ec.c, L, 1.0, 0.0);
    pair[1] = edge_solve(ec.a, ec.b, ec.c, L, 0.0, 1.0);
    for (auto& t : pair) {
      t.samples.reserve(xs.size());
      for (double x : xs) t.samples.push_back(t.eval(x * L));
    }
    out.edge[e] = pair;
    if (use_lookup) edge_reps.push_back(std::move(pair));
  }
  out.stats.edge_classes = use_lookup ? static_cast<int>(edge_reps.size()) : mesh.n_edges();

  // face traces, one solve set per face (or per congruence class)
  out.face.resize(mesh.n_faces());
  KeyMap face_classes;
  std::vector<int> face_rep; // class -> representative face
  auto face_key = [&](Index f) {
    const Face& face = mesh.faces[f];
    const FaceCoeffs fc = linear
        ? FaceCoeffs{Mat2::Identity(), Vec2::Zero(), 0.0, 1.0}
        : coeffs.face[f];
    KeyBuilder kb;
    kb.add_int(face.loop.size());
    const SkeletonFace& sf = skel.faces[f];
    Vec2 cen = Vec2::Zero();
    for (int k = 0; k < sf.tri.n_loop; ++k) cen += sf.tri.vertices[sf.tri.boundary_vertex(k, 0)];
    cen /= double(sf.tri.n_loop);
    for (int k = 0; k < sf.tri.n_loop; ++k) {
      Vec2 p = sf.tri.vertices[sf.tri.boundary_vertex(k, 0)] - cen;
      kb.add(p.x()); kb.add(p.y());
    }
    kb.add(fc.A(0, 0)); kb.add(fc.A(0, 1)); kb.add(fc.A(1, 0)); kb.add(fc.A(1, 1));
    kb.add(fc.b.x()); kb.add(fc.b.y()); kb.add(fc.c);
    for (size_t k = 0; k < face.loop.size(); ++k) {
      const Index eid = face.edges[k];
      const EdgeCoeffs ec = linear ? EdgeCoeffs{1.0, 0.0, 0.0} : coeffs.edge[eid];
      kb.add(ec.a); kb.add(ec.b); kb.add(ec.c);
      kb.add_int(mesh.edges[eid].nodes[0] == face.loop[k] ? 1 : 0);
    }
    return kb.data;
  };

  auto solve_face = [&](Index f) {
    const Face& face = mesh.faces[f];
    const SkeletonFace& sf = skel.faces[f];
    const FaceCoeffs fc = linear
        ? FaceCoeffs{Mat2::Identity(), Vec2::Zero(), 0.0, 1.0}
        : coeffs.face[f];
    const int n = sf.tri.n_loop;
    const int nb = sf.tri.n_boundary;
    std::vector<double> deltas = linear
        ? std::vector<double>(sf.tri.triangles.size(), 0.0)
        : supg_deltas(sf.tri, fc);
    FaceBasisSet set;
    set.basis.resize(n);
    std::vector<double> bvals(nb);
    for (int corner = 0; corner < n; ++corner) {
      std::fill(bvals.begin(), bvals.end(), 0.0);
      bvals[sf.tri.boundary_vertex(corner, 0)] = 1.0;
      for (int side = 0; side < 2; ++side) {
        // loop edges incident to this corner: edge (corner) forward, edge
        // (corner-1) backward
        const int k = side == 0 ? corner : (corner + n - 1) % n;
        const Index eid = face.edges[k];
        const bool forward = mesh.edges[eid].nodes[0] == face.loop[k];
        // basis of `corner`: trace equal to 1 at this corner's end of the edge
        const bool at_first = (side == 0);
        // value at loop-parameter sample j comes from canonical sample index
        for (int j = 1; j < seg; ++j) {
          const int canonical = forward ? j : seg - j;
          const bool one_at_node0 = (at_first == forward);
          const EdgeTrace& tr = out.edge[eid][one_at_node0 ? 0 : 1];
          bvals[sf.tri.boundary_vertex(k, j)] = tr.samples[canonical - 1];
        }
      }
      try {
        set.basis[corner] = face_supg_solve(sf.tri, fc, deltas, bvals);
      } catch (const SolverStagnation& err) {
        throw SolverStagnation("basis of node " + std::to_string(face.loop[corner]) +
                               " on face " + std::to_string(f) + ": " + err.what());
      }
    }
    return set;
  };

  int n_face_classes = 0;
  for (Index f = 0; f < mesh.n_faces(); ++f) {
    if (use_lookup) {
      auto key = face_key(f);
      auto [it, inserted] = face_classes.try_emplace(std::move(key),
                                                     static_cast<int>(face_rep.size()));
      if (!inserted) {
        out.face[f] = out.face[face_rep[it->second]];
        continue;
      }
      face_rep.push_back(f);
      ++n_face_classes;
    }
    out.face[f] = solve_face(f);
  }
  out.stats.face_classes = use_lookup ? n_face_classes : mesh.n_faces();
  return out;
}

RestrictionMatrix build_restriction(const PolyMesh& mesh, const SkeletonMesh& skel,
                                    const BasisTraces& traces, const ElementSurface& surf,
                                    Index element) {
  RestrictionMatrix R;
  R.element = element;
  const Element& el = mesh.elements[element];
  R.columns = el.nodes;
  const int nv = static_cast<int>(R.columns.size());
  const int na = static_cast<int>(surf.gids.size());
  R.values = MatX::Zero(na, nv);

  std::unordered_map<Index, int> col_of;
  for (int j = 0; j < nv; ++j) col_of[R.columns[j]] = j;

  // cache face-local vertex index by global id for the element's faces
  std::unordered_map<Index, std::pair<Index, int>> face_vertex; // gid -> (face, local)
  for (Index f : el.faces) {
    const SkeletonFace& sf = skel.faces[f];
    for (size_t v = 0; v < sf.global_ids.size(); ++v)
      face_vertex.try_emplace(sf.global_ids[v], f, static_cast<int>(v));
  }

  const int seg = 1 << skel.level;
  for (int r = 0; r < na; ++r) {
    const Index gid = surf.gids[r];
    const AuxInfo& info = skel.aux_info[gid];
    switch (info.kind) {
      case AuxInfo::Kind::MeshNode: {
        auto it = col_of.find(info.owner);
        if (it != col_of.end()) R.values(r, it->second) = 1.0;
        break;
      }
      case AuxInfo::Kind::EdgeSample: {
        const Edge& ed = mesh.edges[info.owner];
        const auto& pair = traces.edge[info.owner];
        for (int endpoint = 0; endpoint < 2; ++endpoint) {
          auto it = col_of.find(ed.nodes[endpoint]);
          if (it != col_of.end())
            R.values(r, it->second) = pair[endpoint].samples[info.index - 1];
        }
        break;
      }
      case AuxInfo::Kind::FaceInterior: {
        const Index f = info.owner;
        const SkeletonFace& sf = skel.faces[f];
        const Face& face = mesh.faces[f];
        const int local = sf.tri.n_boundary + info.index;
        for (size_t corner = 0; corner < face.loop.size(); ++corner) {
          auto it = col_of.find(face.loop[corner]);
          if (it != col_of.end())
            R.values(r, it->second) = traces.face[f].basis[corner](local);
        }
        break;
      }
    }
  }
  (void)seg;
  return R;
}

} // namespace cabem
