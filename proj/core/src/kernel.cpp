#include "cabem/kernel.hpp"

#include "cabem/errors.hpp"

#include <Eigen/Cholesky>

#include <cmath>

namespace cabem {

Kernel Kernel::make(const Mat3& A, const Vec3& b, double c) {
  Kernel k;
  Eigen::LLT<Mat3> llt(A);
  if (llt.info() != Eigen::Success)
    throw BadCoefficients("kernel requires a symmetric positive definite diffusion matrix");
  if (c < 0) throw BadCoefficients("kernel requires c >= 0");
  k.A_inv = llt.solve(Mat3::Identity());
  const Mat3 L = llt.matrixL();
  k.sqrt_det_A = L(0, 0) * L(1, 1) * L(2, 2);
  k.b = b;
  k.c = c;
  k.half_Ainv_b = 0.5 * (k.A_inv * b);
  k.lambda = std::sqrt(c + 0.25 * b.dot(k.A_inv * b));
  k.scale = 1.0 / (4.0 * M_PI * k.sqrt_det_A);
  const double alpha = A(0, 0);
  k.isotropic = (A - alpha * Mat3::Identity()).cwiseAbs().maxCoeff() <= 1e-14 * alpha;
  k.inv_alpha = k.isotropic ? 1.0 / alpha : 1.0;
  return k;
}

double fundamental_solution(const Kernel& k, const Vec3& x, const Vec3& y) {
  const Vec3 r = x - y;
  const double rho = k.norm_Ainv(r);
  if (rho < 1e-280) throw CoincidentPoints("fundamental solution evaluated at x = y");
  const double arg = k.half_Ainv_b.dot(r) - k.lambda * rho;
  return k.scale * std::exp(arg) / rho;
}

Vec3 fundamental_solution_grad_x(const Kernel& k, const Vec3& x, const Vec3& y) {
  const Vec3 r = x - y;
  const double rho = k.norm_Ainv(r);
  if (rho < 1e-280) throw CoincidentPoints("fundamental solution gradient at x = y");
  const double g = k.scale * std::exp(k.half_Ainv_b.dot(r) - k.lambda * rho) / rho;
  const Vec3 Ainv_r = k.isotropic ? Vec3(k.inv_alpha * r) : Vec3(k.A_inv * r);
  return g * (k.half_Ainv_b - (k.lambda / rho + 1.0 / (rho * rho)) * Ainv_r);
}

} // namespace cabem
