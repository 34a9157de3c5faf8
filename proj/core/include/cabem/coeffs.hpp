#pragma once

#include "cabem/mesh.hpp"
#include "cabem/types.hpp"

#include <functional>
#include <vector>

namespace cabem {

struct ElementCoeffs {
  Mat3 A = Mat3::Identity();
  Vec3 b = Vec3::Zero();
  double c = 0.0;
  double alpha = 1.0; // smallest eigenvalue of A
};

struct FaceCoeffs {
  Mat2 A = Mat2::Identity(); // leading 2x2 block of R^T A R in the face frame
  Vec2 b = Vec2::Zero();
  double c = 0.0;
  double alpha = 1.0; // smallest eigenvalue of A
};

struct EdgeCoeffs {
  double a = 1.0; // (1,1) entry of R^T A R in the edge frame
  double b = 0.0;
  double c = 0.0;
};

struct CoefficientField {
  std::vector<ElementCoeffs> element;
  std::vector<FaceCoeffs> face;
  std::vector<EdgeCoeffs> edge;
};

struct CoefficientFunctions {
  std::function<Mat3(const Vec3&)> A;
  std::function<Vec3(const Vec3&)> b;
  std::function<double(const Vec3&)> c;
};

/// Projects coefficient functions to per-element constants (average over the
/// element vertices and the centroid), then derives face and edge constants
/// by equal-weight averaging over incident elements followed by the frame
/// transform. Throws NonSPDDiffusion / NegativeReaction.
CoefficientField project_coefficients(const CoefficientFunctions& fields, const PolyMesh& mesh);

/// Shortcut for globally constant coefficients.
CoefficientField constant_coefficients(const Mat3& A, const Vec3& b, double c,
                                       const PolyMesh& mesh);

/// Mesh Peclet number h |b| / alpha of one element.
double element_peclet(const PolyMesh& mesh, const CoefficientField& coeffs, Index element);

/// max over elements of h_T |b_T| / alpha_T.
double mesh_peclet(const PolyMesh& mesh, const CoefficientField& coeffs);

/// Local face-triangle Peclet number h_k |b_F| / alpha_F.
double triangle_peclet(double h_k, double b_norm, double alpha);

/// SUPG stabilization: h_k/2 in the convection-dominated case (Pe > 2), else 0.
double supg_delta(double h_k, double b_norm, double alpha);

/// Constant isotropic diffusion alpha, unit convection along x1, no reaction.
CoefficientFunctions exp1_coefficients(double alpha);

/// Isotropic diffusion alpha with the rotating convection field around the
/// edge {x1=1, x3=1}, scaled to |b| = 0.85; no reaction.
CoefficientFunctions exp2_coefficients(double alpha);

} // namespace cabem
