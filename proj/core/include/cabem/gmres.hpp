#pragma once

#include "cabem/errors.hpp"
#include "cabem/types.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace cabem {

struct GmresResult {
  VecX x;
  int iterations = 0;
  double relative_residual = 0.0;
  bool converged = false;
};

/// Unrestarted GMRES with modified Gram-Schmidt (one reorthogonalization
/// pass) and Givens rotations. Starts from the zero vector; stops when the
/// residual norm drops below tol * ||M(b)||. `op` applies the matrix,
/// `precond` the (left) preconditioner; pass IdentityPrecond{} for an
/// unpreconditioned solve. Throws NoConvergence after max_iter steps
/// (defaults to the system dimension).
template <class Op, class Precond>
GmresResult gmres(long n, const Op& op, const Precond& precond, const VecX& b,
                  double tol, long max_iter = -1) {
  if (max_iter < 0) max_iter = n;
  GmresResult res;
  VecX r0 = precond(b);
  const double beta = r0.norm();
  if (beta == 0.0 || n == 0) {
    res.x = VecX::Zero(n);
    res.converged = true;
    return res;
  }

  std::vector<VecX> basis;
  basis.reserve(static_cast<size_t>(max_iter) + 1);
  basis.push_back(r0 / beta);

  MatX hess = MatX::Zero(max_iter + 1, max_iter);
  VecX cs = VecX::Zero(max_iter), sn = VecX::Zero(max_iter);
  VecX g = VecX::Zero(max_iter + 1);
  g(0) = beta;

  long j = 0;
  bool done = false;
  for (; j < max_iter; ++j) {
    VecX w = precond(op(basis[j]));
    for (long i = 0; i <= j; ++i) {
      double h = w.dot(basis[i]);
      hess(i, j) = h;
      w -= h * basis[i];
    }
    for (long i = 0; i <= j; ++i) { // reorthogonalize
      double h = w.dot(basis[i]);
      hess(i, j) += h;
      w -= h * basis[i];
    }
    const double hnext = w.norm();
    hess(j + 1, j) = hnext;

    for (long i = 0; i < j; ++i) {
      double t = cs(i) * hess(i, j) + sn(i) * hess(i + 1, j);
      hess(i + 1, j) = -sn(i) * hess(i, j) + cs(i) * hess(i + 1, j);
      hess(i, j) = t;
    }
    const double denom = std::hypot(hess(j, j), hess(j + 1, j));
    if (denom == 0.0) { cs(j) = 1.0; sn(j) = 0.0; }
    else { cs(j) = hess(j, j) / denom; sn(j) = hess(j + 1, j) / denom; }
    hess(j, j) = cs(j) * hess(j, j) + sn(j) * hess(j + 1, j);
    hess(j + 1, j) = 0.0;
    g(j + 1) = -sn(j) * g(j);
    g(j) = cs(j) * g(j);

    res.relative_residual = std::abs(g(j + 1)) / beta;
    if (res.relative_residual <= tol) { ++j; done = true; break; }
    if (hnext == 0.0) { ++j; break; } // stagnation without convergence
    basis.push_back(w / hnext);
  }

  res.iterations = static_cast<int>(j);
  if (!done)
    throw NoConvergence("gmres: no convergence in " + std::to_string(j) +
                        " iterations (relative residual " +
                        std::to_string(res.relative_residual) + ")");

  VecX y = VecX::Zero(j);
  for (long i = j - 1; i >= 0; --i) {
    double s = g(i);
    for (long k = i + 1; k < j; ++k) s -= hess(i, k) * y(k);
    y(i) = s / hess(i, i);
  }
  res.x = VecX::Zero(n);
  for (long i = 0; i < j; ++i) res.x += y(i) * basis[i];
  res.converged = true;
  return res;
}

struct IdentityPrecond {
  const VecX& operator()(const VecX& v) const { return v; }
};

} // namespace cabem
