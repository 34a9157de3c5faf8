#include "cabem/harness.hpp"

#include "cabem/coeffs.hpp"
#include "cabem/errors.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

namespace cabem {

SkeletalSolution evaluate_solution(const VecX& coefficients, const PolyMesh& mesh,
                                   const SkeletonMesh& skel, const BasisTraces& traces) {
  SkeletalSolution sol;
  sol.coefficients = coefficients;
  sol.aux_values = VecX::Zero(skel.n_aux());
  for (Index i = 0; i < mesh.n_nodes(); ++i) sol.aux_values(i) = coefficients(i);

  const int seg = 1 << skel.level;
  for (Index e = 0; e < mesh.n_edges(); ++e) {
    const Edge& ed = mesh.edges[e];
    const double v0 = coefficients(ed.nodes[0]);
    const double v1 = coefficients(ed.nodes[1]);
    for (int j = 1; j < seg; ++j) {
      sol.aux_values(skel.edge_sample_id(e, j)) =
          v0 * traces.edge[e][0].samples[j - 1] + v1 * traces.edge[e][1].samples[j - 1];
    }
  }
  for (Index f = 0; f < mesh.n_faces(); ++f) {
    const SkeletonFace& sf = skel.faces[f];
    const Face& face = mesh.faces[f];
    for (size_t v = sf.tri.n_boundary; v < sf.tri.vertices.size(); ++v) {
      double val = 0.0;
      for (size_t corner = 0; corner < face.loop.size(); ++corner)
        val += coefficients(face.loop[corner]) * traces.face[f].basis[corner](v);
      sol.aux_values(sf.global_ids[v]) = val;
    }
  }
  return sol;
}

std::pair<double, double> max_principle_check(const SkeletalSolution& sol,
                                              const SkeletonMesh& skel) {
  (void)skel;
  return {sol.aux_values.minCoeff(), sol.aux_values.maxCoeff()};
}

double exp1_dirichlet(const Vec3& x) { return x.x() + x.y() + x.z(); }

double exp2_dirichlet(const Vec3& x) {
  if (std::abs(x.y()) > 1e-12) return 0.0;
  auto hat = [](double t) { return std::max(0.0, 1.0 - std::abs(2.0 * t - 1.0)); };
  return 3.0 * hat(x.x()) * hat(x.z());
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  const auto t0 = std::chrono::steady_clock::now();

  PolyMesh mesh = config.which == Experiment::exp1 ? build_unit_cube_tet_mesh(config.cube_n)
                                                   : paper_like_prism_mesh();
  CoefficientFunctions fields = config.which == Experiment::exp1
                                    ? exp1_coefficients(config.alpha)
                                    : exp2_coefficients(config.alpha);
  CoefficientField coeffs = project_coefficients(fields, mesh);

  ShiftPolicy shift;
  shift.enabled = config.mode == TraceMode::adapted;
  SkeletonMesh skel = build_skeleton_mesh(mesh, config.level, coeffs, shift);
  BasisTraces traces = build_basis_traces(mesh, skel, coeffs, config.mode, config.use_lookup);

  auto g = config.which == Experiment::exp1 ? exp1_dirichlet : exp2_dirichlet;
  AssemblyOptions opts;
  opts.quadrature = config.quadrature;
  opts.use_lookup = config.use_lookup;
  opts.threads = config.threads;
  GlobalSystem sys = assemble_and_reduce(mesh, skel, coeffs, traces, g, opts);

  ExperimentReport rep;
  rep.alpha = config.alpha;
  rep.level = config.level;
  rep.mode = config.mode;
  rep.pe_h = mesh_peclet(mesh, coeffs);
  rep.n_interior = sys.n_interior();
  rep.stats = sys.stats;

  SolveResult solved;
  bool have = false;
  if (config.run_plain) {
    solved = gmres_solve(sys, Precond::none, config.tol);
    rep.iters_plain = solved.iterations;
    have = true;
  }
  if (config.run_grs) {
    SolveResult sg = gmres_solve(sys, Precond::grs, config.tol);
    rep.iters_grs = sg.iterations;
    if (!have) { solved = sg; have = true; }
  }
  if (!have) throw InconsistentDimensions("experiment must run at least one solver");

  SkeletalSolution sol = evaluate_solution(solved.coefficients, mesh, skel, traces);
  auto [umin, umax] = max_principle_check(sol, skel);
  rep.u_min = umin;
  rep.u_max = umax;
  if (config.vtk_path) export_vtk(sol, skel, *config.vtk_path);

  rep.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

std::string csv_header() {
  return "alpha,pe_h,level,mode,u_min,u_max,iters,iters_grs,n_interior,wall_seconds";
}

std::string csv_row(const ExperimentReport& r) {
  std::ostringstream os;
  os.precision(12);
  os << r.alpha << ',' << r.pe_h << ',' << r.level << ','
     << (r.mode == TraceMode::adapted ? "adapted" : "linear") << ',' << r.u_min << ','
     << r.u_max << ',' << r.iters_plain << ',' << r.iters_grs << ',' << r.n_interior << ','
     << r.wall_seconds;
  return os.str();
}

void write_csv(std::span<const ExperimentReport> reports, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << csv_header() << '\n';
  for (const auto& r : reports) out << csv_row(r) << '\n';
}

void save_solution_json(const SkeletalSolution& sol, const SkeletonMesh& skel,
                        const std::string& path) {
  nlohmann::json j;
  j["level"] = skel.level;
  j["coefficients"] = std::vector<double>(sol.coefficients.data(),
                                          sol.coefficients.data() + sol.coefficients.size());
  j["aux_values"] = std::vector<double>(sol.aux_values.data(),
                                        sol.aux_values.data() + sol.aux_values.size());
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << j.dump(1) << '\n';
}

} // namespace cabem
