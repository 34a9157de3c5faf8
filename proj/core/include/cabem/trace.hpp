#pragma once

#include "cabem/auxtri.hpp"
#include "cabem/coeffs.hpp"
#include "cabem/mesh.hpp"
#include "cabem/types.hpp"

#include <array>
#include <span>
#include <vector>

namespace cabem {

/// Closed-form solution of -a u'' + b u' + c u = 0 on (0, L) with Dirichlet
/// endpoint values. Exponentials are stored in shifted form so evaluation
/// never overflows: each basis exponential has a non-positive argument on
/// [0, L].
struct EdgeTrace {
  double a = 1.0, b = 0.0, c = 0.0, length = 1.0;
  bool double_root = false;
  // two-root form: c1 exp(l1 (x - s1)) + c2 exp(l2 (x - s2))
  // double-root form: (c1 + c2 x) exp(mu (x - s1))
  double l1 = 0.0, l2 = 0.0, mu = 0.0;
  double s1 = 0.0, s2 = 0.0;
  double c1 = 0.0, c2 = 0.0;
  std::vector<double> samples; // values at interior partition nodes, if requested

  double eval(double x) const;
  double deriv(double x) const;
  double deriv2(double x) const;
  /// Residual -a u'' + b u' + c u at x, relative to the term magnitudes.
  double residual(double x) const;
};

/// Solves the edge problem; throws DegenerateEdge (L <= 0) or
/// BadCoefficients (a <= 0 or c < 0).
EdgeTrace edge_solve(double a, double b, double c, double L, double u0, double uL);

/// Convenience: solve and evaluate at the given sample points.
std::vector<double> edge_solve_at(double a, double b, double c, double L, double u0,
                                  double uL, std::span<const double> xs);

struct FaceSolverOptions {
  int dense_cutoff = 200;   // direct factorization below, GMRES above
  double gmres_tol = 1e-10; // relative residual reduction
};

/// Piecewise-linear SUPG solve on a face triangulation. `boundary_values`
/// are given at the n_boundary loop-ordered boundary vertices; the returned
/// vector holds values at all vertices. `deltas` is the per-triangle
/// stabilization (pass supg_deltas(tri, fc) for the standard rule).
VecX face_supg_solve(const FaceTriangulation& tri, const FaceCoeffs& fc,
                     std::span<const double> deltas, std::span<const double> boundary_values,
                     const FaceSolverOptions& opts = {});

std::vector<double> supg_deltas(const FaceTriangulation& tri, const FaceCoeffs& fc);

enum class TraceMode { adapted, linear };

/// Per-face basis traces: basis[k] holds the values of the skeletal basis
/// function of polygon corner k at every vertex of the face triangulation.
struct FaceBasisSet {
  std::vector<VecX> basis;
};

struct LookupStats {
  bool enabled = false;
  int edge_classes = 0;
  int face_classes = 0;
  int element_classes = 0; // filled by the assembly stage
};

/// All edge and face traces of the skeletal basis. Face problems are solved
/// once per face and shared by both incident elements; with lookup enabled,
/// faces and edges that are congruent under translation (same in-frame
/// geometry and coefficients) share one solve.
struct BasisTraces {
  TraceMode mode = TraceMode::adapted;
  std::vector<std::array<EdgeTrace, 2>> edge; // [0]: u=1 at canonical first node
  std::vector<FaceBasisSet> face;
  LookupStats stats;
};

BasisTraces build_basis_traces(const PolyMesh& mesh, const SkeletonMesh& skel,
                               const CoefficientField& coeffs, TraceMode mode,
                               bool use_lookup = true);

/// Columns are the traces of the basis functions of the element's own mesh
/// nodes on the element surface: values(row r, col j) is basis j evaluated at
/// surface auxiliary node r. Columns of all other mesh nodes vanish.
struct RestrictionMatrix {
  Index element = kInvalidIndex;
  std::vector<Index> columns; // mesh node ids (the element's nodes)
  MatX values;                // (surface aux nodes) x columns.size()
};

RestrictionMatrix build_restriction(const PolyMesh& mesh, const SkeletonMesh& skel,
                                    const BasisTraces& traces, const ElementSurface& surf,
                                    Index element);

} // namespace cabem
