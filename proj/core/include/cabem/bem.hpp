#pragma once

#include "cabem/auxtri.hpp"
#include "cabem/kernel.hpp"
#include "cabem/types.hpp"

namespace cabem {

struct QuadratureOrders {
  int regular = 3;        // tensor Gauss order per direction, separated pairs
  int singular = 4;       // order for the regularizing transforms and near pairs
  double near_factor = 1.0; // promote pairs closer than factor * max diameter
};

/// Galerkin boundary operator matrices of one element over its surface
/// triangulation: piecewise-constant test/trial space {psi_k} on triangles,
/// piecewise-linear trial space {phi_i} on auxiliary nodes.
///   V(k,l) = <psi_k, V psi_l>,  K(k,i) = <psi_k, K phi_i>,
///   M(k,i) = <psi_k, phi_i>,    S = M^T V^{-1} (M/2 + K).
struct ElementOperators {
  MatX V; // n_tri x n_tri
  MatX K; // n_tri x n_aux
  MatX M; // n_tri x n_aux
  MatX S; // n_aux x n_aux
};

/// Assembles V, K, M (not S) for the given closed surface. All kernel
/// evaluations run in coordinates relative to the surface barycenter, so
/// translated surfaces produce bit-identical matrices. Throws
/// QuadratureBreakdown on non-finite entries.
ElementOperators assemble_boundary_operators(const ElementSurface& surf, const Kernel& kernel,
                                             const QuadratureOrders& orders);

/// S = M^T V^{-1} (M/2 + K), factorizing V once. Throws SingularV.
MatX steklov_matrix(const ElementOperators& ops);

/// Convenience: assemble and compute S in one call.
ElementOperators element_operators(const ElementSurface& surf, const Kernel& kernel,
                                   const QuadratureOrders& orders);

} // namespace cabem
