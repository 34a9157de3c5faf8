#include "cabem/coeffs.hpp"

#include "cabem/errors.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <set>

namespace cabem {

namespace {

double smallest_eigenvalue(const Mat3& A) {
  Eigen::SelfAdjointEigenSolver<Mat3> es(A, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double smallest_eigenvalue(const Mat2& A) {
  double tr = A.trace();
  double det = A.determinant();
  double disc = std::sqrt(std::max(0.0, 0.25 * tr * tr - det));
  return 0.5 * tr - disc;
}

void check_element(const ElementCoeffs& ec, Index e) {
  if ((ec.A - ec.A.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw NonSPDDiffusion("diffusion matrix of element " + std::to_string(e) + " not symmetric");
  Eigen::LLT<Mat3> llt(ec.A);
  if (llt.info() != Eigen::Success)
    throw NonSPDDiffusion("diffusion matrix of element " + std::to_string(e) +
                          " not positive definite");
  if (ec.c < 0)
    throw NegativeReaction("reaction coefficient of element " + std::to_string(e) + " negative");
}

} // namespace

CoefficientField project_coefficients(const CoefficientFunctions& fields, const PolyMesh& mesh) {
  CoefficientField cf;
  cf.element.resize(mesh.n_elements());
  for (Index e = 0; e < mesh.n_elements(); ++e) {
    const Element& el = mesh.elements[e];
    Mat3 A = Mat3::Zero();
    Vec3 b = Vec3::Zero();
    double c = 0.0;
    std::vector<Vec3> pts;
    for (Index nd : el.nodes) pts.push_back(mesh.nodes[nd]);
    pts.push_back(el.centroid);
    for (const Vec3& p : pts) {
      A += fields.A(p);
      b += fields.b(p);
      c += fields.c(p);
    }
    const double w = 1.0 / double(pts.size());
    ElementCoeffs& ec = cf.element[e];
    ec.A = 0.5 * w * (A + A.transpose());
    ec.b = w * b;
    ec.c = w * c;
    if (ec.c < 0 && ec.c > -1e-14) ec.c = 0.0;
    check_element(ec, e);
    ec.alpha = smallest_eigenvalue(ec.A);
  }

  cf.face.resize(mesh.n_faces());
  for (Index f = 0; f < mesh.n_faces(); ++f) {
    const Face& face = mesh.faces[f];
    Mat3 A = Mat3::Zero();
    Vec3 b = Vec3::Zero();
    double c = 0.0;
    int cnt = 0;
    for (Index e : face.elements) {
      if (e == kInvalidIndex) continue;
      A += cf.element[e].A;
      b += cf.element[e].b;
      c += cf.element[e].c;
      ++cnt;
    }
    A /= cnt; b /= cnt; c /= cnt;
    const Mat3 R = face_frame(mesh, f).rotation;
    Mat3 At = R.transpose() * A * R;
    FaceCoeffs& fc = cf.face[f];
    fc.A = At.topLeftCorner<2, 2>();
    fc.b = (R.transpose() * b).head<2>();
    fc.c = c;
    fc.alpha = smallest_eigenvalue(fc.A);
  }

  cf.edge.resize(mesh.n_edges());
  for (Index ed = 0; ed < mesh.n_edges(); ++ed) {
    std::set<Index> elems;
    for (Index f : mesh.edges[ed].faces)
      for (Index e : mesh.faces[f].elements)
        if (e != kInvalidIndex) elems.insert(e);
    Mat3 A = Mat3::Zero();
    Vec3 b = Vec3::Zero();
    double c = 0.0;
    for (Index e : elems) {
      A += cf.element[e].A;
      b += cf.element[e].b;
      c += cf.element[e].c;
    }
    A /= double(elems.size()); b /= double(elems.size()); c /= double(elems.size());
    const Mat3 R = edge_frame(mesh, ed).rotation;
    EdgeCoeffs& ec = cf.edge[ed];
    ec.a = (R.transpose() * A * R)(0, 0);
    ec.b = (R.transpose() * b)(0);
    ec.c = c;
  }
  return cf;
}

CoefficientField constant_coefficients(const Mat3& A, const Vec3& b, double c,
                                       const PolyMesh& mesh) {
  CoefficientFunctions f;
  f.A = [A](const Vec3&) { return A; };
  f.b = [b](const Vec3&) { return b; };
  f.c = [c](const Vec3&) { return c; };
  return project_coefficients(f, mesh);
}

double element_peclet(const PolyMesh& mesh, const CoefficientField& coeffs, Index element) {
  const ElementCoeffs& ec = coeffs.element[element];
  return mesh.elements[element].diameter * ec.b.norm() / ec.alpha;
}

double mesh_peclet(const PolyMesh& mesh, const CoefficientField& coeffs) {
  double pe = 0.0;
  for (Index e = 0; e < mesh.n_elements(); ++e)
    pe = std::max(pe, element_peclet(mesh, coeffs, e));
  return pe;
}

double triangle_peclet(double h_k, double b_norm, double alpha) {
  return h_k * b_norm / alpha;
}

double supg_delta(double h_k, double b_norm, double alpha) {
  return triangle_peclet(h_k, b_norm, alpha) > 2.0 ? 0.5 * h_k : 0.0;
}

CoefficientFunctions exp1_coefficients(double alpha) {
  CoefficientFunctions f;
  f.A = [alpha](const Vec3&) { return Mat3(alpha * Mat3::Identity()); };
  f.b = [](const Vec3&) { return Vec3(1.0, 0.0, 0.0); };
  f.c = [](const Vec3&) { return 0.0; };
  return f;
}

CoefficientFunctions exp2_coefficients(double alpha) {
  CoefficientFunctions f;
  f.A = [alpha](const Vec3&) { return Mat3(alpha * Mat3::Identity()); };
  f.b = [](const Vec3& x) {
    const double dx = 1.0 - x.x(), dz = 1.0 - x.z();
    const double r = std::sqrt(dx * dx + dz * dz);
    if (r < 1e-12) return Vec3(0.0, 0.0, 0.0); // on the rotation axis
    return Vec3(0.85 / r * (x.z() - 1.0), 0.0, 0.85 / r * (1.0 - x.x()));
  };
  f.c = [](const Vec3&) { return 0.0; };
  return f;
}

} // namespace cabem
