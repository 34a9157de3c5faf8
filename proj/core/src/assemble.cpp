#include "cabem/assemble.hpp"

#include "cabem/errors.hpp"
#include "cabem/gmres.hpp"
#include "cabem/parallel.hpp"

#include <cmath>
#include <unordered_map>

namespace cabem {

namespace {

constexpr double kQuant = 1e12;

struct VecKeyHash {
  size_t operator()(const std::vector<long long>& v) const {
    size_t h = 1469598103934665603ull;
    for (long long x : v)
      h ^= static_cast<size_t>(x) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    return h;
  }
};

// Everything that determines the element matrix R^T S R up to translation:
// the construction sequence of the surface (face loops relative to the
// element barycenter, orientation signs, edge orientation flags) and all
// element/face/edge coefficients entering kernel and traces.
std::vector<long long> element_key(const PolyMesh& mesh, const CoefficientField& coeffs,
                                   Index e) {
  std::vector<long long> key;
  const Element& el = mesh.elements[e];
  auto add = [&](double v) { key.push_back(llround(v * kQuant)); };
  auto addi = [&](long long v) { key.push_back(v); };

  const ElementCoeffs& ec = coeffs.element[e];
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) add(ec.A(i, j));
  for (int i = 0; i < 3; ++i) add(ec.b(i));
  add(ec.c);

  for (size_t k = 0; k < el.faces.size(); ++k) {
    const Face& face = mesh.faces[el.faces[k]];
    addi(el.face_signs[k]);
    addi(static_cast<long long>(face.loop.size()));
    for (size_t m = 0; m < face.loop.size(); ++m) {
      const Vec3 rel = mesh.nodes[face.loop[m]] - el.centroid;
      add(rel.x()); add(rel.y()); add(rel.z());
      addi(mesh.edges[face.edges[m]].nodes[0] == face.loop[m] ? 1 : 0);
      const EdgeCoeffs& edc = coeffs.edge[face.edges[m]];
      add(edc.a); add(edc.b); add(edc.c);
    }
    const FaceCoeffs& fc = coeffs.face[el.faces[k]];
    add(fc.A(0, 0)); add(fc.A(0, 1)); add(fc.A(1, 0)); add(fc.A(1, 1));
    add(fc.b.x()); add(fc.b.y()); add(fc.c);
  }
  return key;
}

} // namespace

GlobalSystem assemble_and_reduce(const PolyMesh& mesh, const SkeletonMesh& skel,
                                 const CoefficientField& coeffs, const BasisTraces& traces,
                                 const std::function<double(const Vec3&)>& g,
                                 const AssemblyOptions& opts) {
  const Index ne = mesh.n_elements();
  GlobalSystem sys;
  sys.stats = traces.stats;

  // group elements into translation classes
  std::vector<std::vector<Index>> groups;
  if (opts.use_lookup) {
    std::unordered_map<std::vector<long long>, int, VecKeyHash> classes;
    for (Index e = 0; e < ne; ++e) {
      auto key = element_key(mesh, coeffs, e);
      auto [it, inserted] = classes.try_emplace(std::move(key),
                                                static_cast<int>(groups.size()));
      if (inserted) groups.emplace_back();
      groups[it->second].push_back(e);
    }
  } else {
    groups.resize(ne);
    for (Index e = 0; e < ne; ++e) groups[e] = {e};
  }
  sys.stats.element_classes = static_cast<int>(groups.size());
  if (!opts.use_lookup) {
    sys.stats.element_classes = ne;
    sys.stats.enabled = false;
  }

  // per-class element matrix R^T S R and its member column sets
  struct ClassResult {
    MatX elem; // nv x nv
  };
  std::vector<ClassResult> results(groups.size());
  parallel_for(static_cast<long>(groups.size()), [&](long gi) {
    const Index rep = groups[gi][0];
    const ElementCoeffs& ec = coeffs.element[rep];
    const Kernel kernel = Kernel::make(ec.A, ec.b, ec.c);
    ElementSurface surf = element_surface(mesh, skel, rep);
    ElementOperators ops;
    try {
      ops = element_operators(surf, kernel, opts.quadrature);
    } catch (const Error& err) {
      throw QuadratureBreakdown("element " + std::to_string(rep) + ": " + err.what());
    }
    RestrictionMatrix R = build_restriction(mesh, skel, traces, surf, rep);
    results[gi].elem = R.values.transpose() * ops.S * R.values;
  }, opts.threads);

  // scatter: members of a class share the matrix, with their own node ids
  std::vector<Eigen::Triplet<double>> trips;
  for (size_t gi = 0; gi < groups.size(); ++gi) {
    const MatX& elem = results[gi].elem;
    for (Index e : groups[gi]) {
      const std::vector<Index>& cols = mesh.elements[e].nodes;
      if (static_cast<int>(cols.size()) != elem.rows())
        throw InconsistentDimensions("element class node count mismatch");
      for (int i = 0; i < elem.rows(); ++i)
        for (int j = 0; j < elem.cols(); ++j)
          trips.emplace_back(cols[i], cols[j], elem(i, j));
    }
  }
  const Index nn = mesh.n_nodes();
  sys.K.resize(nn, nn);
  sys.K.setFromTriplets(trips.begin(), trips.end());

  // homogenization of the Dirichlet nodes
  std::vector<Index> local(nn, kInvalidIndex);
  for (Index i = 0; i < nn; ++i) {
    if (mesh.node_boundary[i]) sys.dirichlet.push_back(i);
    else sys.interior.push_back(i);
  }
  for (size_t i = 0; i < sys.interior.size(); ++i) local[sys.interior[i]] = static_cast<Index>(i);
  std::vector<Index> blocal(nn, kInvalidIndex);
  for (size_t i = 0; i < sys.dirichlet.size(); ++i) blocal[sys.dirichlet[i]] = static_cast<Index>(i);

  sys.dirichlet_values.resize(sys.dirichlet.size());
  for (size_t i = 0; i < sys.dirichlet.size(); ++i)
    sys.dirichlet_values(i) = g(mesh.nodes[sys.dirichlet[i]]);

  std::vector<Eigen::Triplet<double>> tii, tib;
  for (int col = 0; col < sys.K.outerSize(); ++col) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(sys.K, col); it; ++it) {
      const Index r = static_cast<Index>(it.row()), c = static_cast<Index>(it.col());
      if (local[r] == kInvalidIndex) continue;
      if (local[c] != kInvalidIndex) tii.emplace_back(local[r], local[c], it.value());
      else tib.emplace_back(local[r], blocal[c], it.value());
    }
  }
  const Index ni = sys.n_interior();
  sys.K_II.resize(ni, static_cast<Index>(sys.interior.size()));
  sys.K_II.setFromTriplets(tii.begin(), tii.end());
  sys.K_IB.resize(ni, static_cast<Index>(sys.dirichlet.size()));
  sys.K_IB.setFromTriplets(tib.begin(), tib.end());
  sys.rhs = -(sys.K_IB * sys.dirichlet_values);
  return sys;
}

SolveResult gmres_solve(const GlobalSystem& sys, Precond precond, double tol) {
  const Index ni = sys.n_interior();
  VecX scale = VecX::Ones(ni);
  if (precond == Precond::grs) {
    VecX rownorm = VecX::Zero(ni);
    for (int col = 0; col < sys.K_II.outerSize(); ++col)
      for (Eigen::SparseMatrix<double>::InnerIterator it(sys.K_II, col); it; ++it)
        rownorm(it.row()) += std::abs(it.value());
    for (Index i = 0; i < ni; ++i)
      scale(i) = rownorm(i) > 0 ? 1.0 / rownorm(i) : 1.0;
  }
  auto op = [&](const VecX& v) { return VecX(sys.K_II * v); };
  auto pre = [&](const VecX& v) { return VecX(scale.asDiagonal() * v); };
  GmresResult r = gmres(ni, op, pre, sys.rhs, tol);

  SolveResult out;
  out.iterations = r.iterations;
  out.relative_residual = r.relative_residual;
  const Index nn = static_cast<Index>(sys.interior.size() + sys.dirichlet.size());
  out.coefficients = VecX::Zero(nn);
  for (size_t i = 0; i < sys.interior.size(); ++i) out.coefficients(sys.interior[i]) = r.x(i);
  for (size_t i = 0; i < sys.dirichlet.size(); ++i)
    out.coefficients(sys.dirichlet[i]) = sys.dirichlet_values(i);
  return out;
}

} // namespace cabem
