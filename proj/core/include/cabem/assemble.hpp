#pragma once

#include "cabem/auxtri.hpp"
#include "cabem/bem.hpp"
#include "cabem/coeffs.hpp"
#include "cabem/mesh.hpp"
#include "cabem/trace.hpp"
#include "cabem/types.hpp"

#include <Eigen/Sparse>

#include <functional>

namespace cabem {

struct AssemblyOptions {
  QuadratureOrders quadrature;
  bool use_lookup = true;
  int threads = 0; // 0 = hardware concurrency
};

/// Reduced skeletal system K_II u_I = -K_IB g_B together with the full
/// assembled matrix and the Dirichlet data.
struct GlobalSystem {
  Eigen::SparseMatrix<double> K;    // full |N| x |N|
  Eigen::SparseMatrix<double> K_II; // interior block
  Eigen::SparseMatrix<double> K_IB;
  std::vector<Index> interior;      // interior node ids
  std::vector<Index> dirichlet;     // boundary node ids
  VecX dirichlet_values;            // g at boundary nodes, in `dirichlet` order
  VecX rhs;                         // -K_IB g_B
  LookupStats stats;

  Index n_interior() const { return static_cast<Index>(interior.size()); }
};

/// Assembles K = sum_T R_T^T S_T R_T and eliminates the Dirichlet nodes by
/// homogenization. With lookup enabled, elements whose vertex coordinates
/// relative to the barycenter and coefficient data agree to 1e-12 share one
/// operator and trace computation.
GlobalSystem assemble_and_reduce(const PolyMesh& mesh, const SkeletonMesh& skel,
                                 const CoefficientField& coeffs, const BasisTraces& traces,
                                 const std::function<double(const Vec3&)>& g,
                                 const AssemblyOptions& opts = {});

enum class Precond { none, grs };

struct SolveResult {
  VecX coefficients; // all mesh nodes, Dirichlet values merged in
  int iterations = 0;
  double relative_residual = 0.0;
};

/// Unrestarted GMRES from the zero initial guess; `grs` applies left
/// diagonal scaling by reciprocal row 1-norms of the reduced matrix.
SolveResult gmres_solve(const GlobalSystem& system, Precond precond, double tol = 1e-6);

} // namespace cabem
