#pragma once

#include "cabem/types.hpp"

namespace cabem {

/// Precomputed data of the convection-diffusion-reaction fundamental solution
/// for one element (constant coefficients A spd, b, c >= 0):
///
///   G(x,y) = exp( (b/2)^T A^{-1} (x-y) - lambda ||x-y||_{A^{-1}} )
///            / (4 pi sqrt(det A) ||x-y||_{A^{-1}}),
///   lambda = sqrt(c + ||b/2||^2_{A^{-1}}).
///
/// G satisfies L_x G(x,y) = delta(x-y) for L u = -div(A grad u) + b.grad u + cu;
/// the convection enters with the factor 1/2 (substituting u = e^{A^{-1}b.x/2} v
/// reduces L to a Yukawa operator with kappa^2 = c + |b/2|^2_{A^{-1}}).
/// The exponent is assembled before a single exp call and is never positive,
/// since |(b/2)^T A^{-1} r| <= lambda ||r||_{A^{-1}}.
struct Kernel {
  Mat3 A_inv = Mat3::Identity();
  Vec3 b = Vec3::Zero();
  double c = 0.0;
  double sqrt_det_A = 1.0;
  double lambda = 0.0;
  Vec3 half_Ainv_b = Vec3::Zero(); // A^{-1} b / 2
  double scale = 1.0;              // 1 / (4 pi sqrt(det A))
  bool isotropic = false;          // A = alpha I fast path
  double inv_alpha = 1.0;

  static Kernel make(const Mat3& A, const Vec3& b, double c);

  double norm_Ainv(const Vec3& r) const {
    if (isotropic) return r.norm() * std::sqrt(inv_alpha);
    return std::sqrt(r.dot(A_inv * r));
  }
};

/// Closed-form fundamental solution G(x, y). Throws CoincidentPoints.
double fundamental_solution(const Kernel& k, const Vec3& x, const Vec3& y);

/// Gradient of G with respect to x.
Vec3 fundamental_solution_grad_x(const Kernel& k, const Vec3& x, const Vec3& y);

} // namespace cabem
