#include "cabem/assemble.hpp"
#include "cabem/auxtri.hpp"
#include "cabem/coeffs.hpp"
#include "cabem/errors.hpp"
#include "cabem/harness.hpp"
#include "cabem/mesh.hpp"
#include "cabem/trace.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace cabem;

struct CoeffArgs {
  std::string preset = "exp1";
  double alpha = 1e-3;
  std::vector<double> A, b;
  double c = 0.0;
};

void add_coeff_options(CLI::App* app, CoeffArgs& args) {
  app->add_option("--coeff", args.preset, "coefficient preset: exp1, exp2, const")
      ->check(CLI::IsMember({"exp1", "exp2", "const"}));
  app->add_option("--alpha", args.alpha, "isotropic diffusion for the presets");
  app->add_option("--A", args.A, "constant diffusion matrix, 9 row-major entries")
      ->expected(9);
  app->add_option("--b", args.b, "constant convection vector")->expected(3);
  app->add_option("--c", args.c, "constant reaction coefficient");
}

CoefficientFunctions coeff_functions(const CoeffArgs& args) {
  if (args.preset == "exp1") return exp1_coefficients(args.alpha);
  if (args.preset == "exp2") return exp2_coefficients(args.alpha);
  Mat3 A = args.alpha * Mat3::Identity();
  if (!args.A.empty()) {
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) A(i, j) = args.A[3 * i + j];
  }
  Vec3 b = Vec3::Zero();
  if (!args.b.empty()) b = Vec3(args.b[0], args.b[1], args.b[2]);
  double c = args.c;
  CoefficientFunctions f;
  f.A = [A](const Vec3&) { return A; };
  f.b = [b](const Vec3&) { return b; };
  f.c = [c](const Vec3&) { return c; };
  return f;
}

void print_mesh_stats(const PolyMesh& mesh, const std::string& out) {
  std::cout << "wrote " << out << ": " << mesh.n_nodes() << " nodes, " << mesh.n_edges()
            << " edges, " << mesh.n_faces() << " faces, " << mesh.n_elements()
            << " elements, h_max " << mesh.h_max() << "\n";
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"convection-adapted BEM-based FEM for 3D convection-diffusion-reaction"};
  app.require_subcommand(1);

  // mesh
  auto* mesh_cmd = app.add_subcommand("mesh", "generate or validate polyhedral meshes");
  mesh_cmd->require_subcommand(1);
  auto* gen = mesh_cmd->add_subcommand("gen", "built-in generators");
  gen->require_subcommand(1);
  auto* cube = gen->add_subcommand("cube", "structured tetrahedral mesh of the unit cube");
  int cube_n = 8;
  std::string cube_out;
  cube->add_option("--n", cube_n, "subdivisions per axis");
  cube->add_option("-o,--output", cube_out, "output mesh JSON")->required();
  auto* prisms = gen->add_subcommand("prisms", "prism mesh with polygonal ends");
  std::string prisms_preset = "paper-like", prisms_out;
  int prisms_rows = 8, prisms_layers = 5;
  prisms->add_option("--preset", prisms_preset, "preset name (paper-like or custom)");
  prisms->add_option("--rows", prisms_rows, "hex tiling rows (custom preset)");
  prisms->add_option("--layers", prisms_layers, "extrusion layers (custom preset)");
  prisms->add_option("-o,--output", prisms_out, "output mesh JSON")->required();
  auto* val = mesh_cmd->add_subcommand("validate", "run all mesh invariant checks");
  std::string val_file;
  val->add_option("file", val_file, "mesh JSON file")->required();

  // skel
  auto* skel_cmd = app.add_subcommand("skel", "build the skeleton triangulation");
  std::string skel_mesh, skel_out, skel_vtk;
  int skel_level = 2;
  std::string skel_shift = "on";
  CoeffArgs skel_coeffs;
  skel_cmd->add_option("--mesh", skel_mesh, "mesh JSON file")->required();
  skel_cmd->add_option("--level", skel_level, "refinement level");
  skel_cmd->add_option("--shift", skel_shift, "convection shift of face centers")
      ->check(CLI::IsMember({"on", "off"}));
  skel_cmd->add_option("-o,--output", skel_out, "skeleton JSON output");
  skel_cmd->add_option("--vtk", skel_vtk, "also write a VTK file");
  add_coeff_options(skel_cmd, skel_coeffs);

  // trace dump
  auto* trace_cmd = app.add_subcommand("trace", "dump one basis trace as VTK");
  std::string trace_mesh, trace_out;
  int trace_level = 2;
  Index trace_face = 0, trace_node = 0;
  CoeffArgs trace_coeffs;
  trace_cmd->add_option("--mesh", trace_mesh, "mesh JSON file")->required();
  trace_cmd->add_option("--level", trace_level, "refinement level");
  trace_cmd->add_option("--face", trace_face, "face id")->required();
  trace_cmd->add_option("--node", trace_node, "mesh node id on that face")->required();
  trace_cmd->add_option("-o,--output", trace_out, "VTK output")->required();
  add_coeff_options(trace_cmd, trace_coeffs);

  // solve
  auto* solve_cmd = app.add_subcommand("solve", "assemble and solve the skeletal system");
  std::string solve_mesh, solve_out, solve_vtk, solve_mode = "adapted", solve_precond = "none";
  int solve_level = 2, solve_threads = 0;
  double solve_tol = 1e-6;
  int q_sing = 4, q_reg = 3;
  bool no_lookup = false;
  CoeffArgs solve_coeffs;
  solve_cmd->add_option("--mesh", solve_mesh, "mesh JSON file")->required();
  solve_cmd->add_option("--level", solve_level, "skeleton refinement level");
  solve_cmd->add_option("--trace-mode", solve_mode, "adapted or linear")
      ->check(CLI::IsMember({"adapted", "linear"}));
  solve_cmd->add_option("--precond", solve_precond, "none or grs")
      ->check(CLI::IsMember({"none", "grs"}));
  solve_cmd->add_option("--tol", solve_tol, "GMRES relative residual reduction");
  solve_cmd->add_option("--q-sing", q_sing, "singular quadrature order");
  solve_cmd->add_option("--q-reg", q_reg, "regular quadrature order");
  solve_cmd->add_flag("--no-lookup", no_lookup, "disable the translation look-up table");
  solve_cmd->add_option("--threads", solve_threads, "assembly threads (0 = auto)");
  solve_cmd->add_option("-o,--output", solve_out, "solution JSON output");
  solve_cmd->add_option("--vtk", solve_vtk, "solution VTK output");
  add_coeff_options(solve_cmd, solve_coeffs);

  // bench
  auto* bench_cmd = app.add_subcommand("bench", "run the experiment sweeps");
  std::string bench_which, bench_out, bench_vtk_dir;
  std::vector<double> bench_alphas{1e-1, 5e-2, 2.5e-2, 1e-2, 5e-3, 2.5e-3,
                                   1e-3, 5e-4, 2.5e-4, 1e-4, 5e-5, 2.5e-5};
  std::vector<int> bench_levels{2};
  std::vector<std::string> bench_modes{"adapted"};
  int bench_threads = 0;
  bool bench_grs = false;
  bench_cmd->add_option("experiment", bench_which, "exp1 or exp2")
      ->required()
      ->check(CLI::IsMember({"exp1", "exp2"}));
  bench_cmd->add_option("--alphas", bench_alphas, "diffusion values")->delimiter(',');
  bench_cmd->add_option("--levels", bench_levels, "refinement levels")->delimiter(',');
  bench_cmd->add_option("--mode", bench_modes, "trace modes")->delimiter(',');
  bench_cmd->add_flag("--grs", bench_grs, "also run the GRS-preconditioned solver");
  bench_cmd->add_option("--threads", bench_threads, "assembly threads (0 = auto)");
  bench_cmd->add_option("--out", bench_out, "CSV output file");
  bench_cmd->add_option("--vtk", bench_vtk_dir, "directory for per-run VTK dumps");

  CLI11_PARSE(app, argc, argv);

  try {
    if (mesh_cmd->parsed()) {
      if (cube->parsed()) {
        PolyMesh mesh = build_unit_cube_tet_mesh(cube_n);
        save_mesh_json(mesh, cube_out);
        print_mesh_stats(mesh, cube_out);
      } else if (prisms->parsed()) {
        PolyMesh mesh = prisms_preset == "paper-like"
                            ? paper_like_prism_mesh()
                            : build_prism_mesh(hex_tiling(prisms_rows), prisms_layers);
        save_mesh_json(mesh, prisms_out);
        print_mesh_stats(mesh, prisms_out);
      } else if (val->parsed()) {
        PolyMesh mesh = load_mesh_json(val_file);
        ValidationReport report = validate(mesh);
        std::cout << report.summary();
        return report.ok ? 0 : 1;
      }
      return 0;
    }

    if (skel_cmd->parsed()) {
      PolyMesh mesh = load_mesh_json(skel_mesh);
      CoefficientField coeffs = project_coefficients(coeff_functions(skel_coeffs), mesh);
      ShiftPolicy shift;
      shift.enabled = skel_shift == "on";
      SkeletonMesh skel = build_skeleton_mesh(mesh, skel_level, coeffs, shift);
      size_t ntri = 0;
      for (auto& sf : skel.faces) ntri += sf.tri.triangles.size();
      std::cout << "skeleton: level " << skel_level << ", " << skel.n_aux()
                << " auxiliary nodes, " << ntri << " triangles\n";
      if (!skel_out.empty()) {
        nlohmann::json j;
        j["level"] = skel.level;
        j["n_mesh_nodes"] = skel.n_mesh_nodes;
        for (const Vec3& p : skel.aux_coords) j["aux_nodes"].push_back({p.x(), p.y(), p.z()});
        for (Index i = 0; i < skel.n_aux(); ++i)
          j["dirichlet"].push_back(skel.aux_dirichlet[i] ? 1 : 0);
        for (const auto& sf : skel.faces) {
          nlohmann::json tris = nlohmann::json::array();
          for (const auto& t : sf.tri.triangles)
            tris.push_back({sf.global_ids[t[0]], sf.global_ids[t[1]], sf.global_ids[t[2]]});
          j["faces"].push_back(std::move(tris));
        }
        std::ofstream out(skel_out);
        if (!out) throw IoError("cannot write " + skel_out);
        out << j.dump(1) << '\n';
        std::cout << "wrote " << skel_out << "\n";
      }
      if (!skel_vtk.empty()) {
        export_skeleton_vtk(skel, skel_vtk);
        std::cout << "wrote " << skel_vtk << "\n";
      }
      return 0;
    }

    if (trace_cmd->parsed()) {
      PolyMesh mesh = load_mesh_json(trace_mesh);
      CoefficientField coeffs = project_coefficients(coeff_functions(trace_coeffs), mesh);
      SkeletonMesh skel = build_skeleton_mesh(mesh, trace_level, coeffs, ShiftPolicy{});
      BasisTraces traces = build_basis_traces(mesh, skel, coeffs, TraceMode::adapted);
      export_basis_vtk(mesh, skel, traces, trace_face, trace_node, trace_out);
      std::cout << "wrote " << trace_out << "\n";
      return 0;
    }

    if (solve_cmd->parsed()) {
      PolyMesh mesh = load_mesh_json(solve_mesh);
      CoefficientField coeffs = project_coefficients(coeff_functions(solve_coeffs), mesh);
      TraceMode mode = solve_mode == "adapted" ? TraceMode::adapted : TraceMode::linear;
      ShiftPolicy shift;
      shift.enabled = mode == TraceMode::adapted;
      SkeletonMesh skel = build_skeleton_mesh(mesh, solve_level, coeffs, shift);
      BasisTraces traces = build_basis_traces(mesh, skel, coeffs, mode, !no_lookup);
      AssemblyOptions opts;
      opts.quadrature.singular = q_sing;
      opts.quadrature.regular = q_reg;
      opts.use_lookup = !no_lookup;
      opts.threads = solve_threads;
      auto g = solve_coeffs.preset == "exp2" ? exp2_dirichlet : exp1_dirichlet;
      GlobalSystem sys = assemble_and_reduce(mesh, skel, coeffs, traces, g, opts);
      std::cout << "system: " << sys.n_interior() << " interior nodes";
      if (sys.stats.enabled)
        std::cout << "; classes: " << sys.stats.element_classes << " elements, "
                  << sys.stats.face_classes << " faces, " << sys.stats.edge_classes
                  << " edges";
      std::cout << "\n";
      SolveResult res = gmres_solve(
          sys, solve_precond == "grs" ? Precond::grs : Precond::none, solve_tol);
      std::cout << "gmres iterations: " << res.iterations << "\n";
      SkeletalSolution sol = evaluate_solution(res.coefficients, mesh, skel, traces);
      auto [umin, umax] = max_principle_check(sol, skel);
      std::cout << "skeleton extrema: u_min " << umin << ", u_max " << umax << "\n";
      if (!solve_out.empty()) {
        save_solution_json(sol, skel, solve_out);
        std::cout << "wrote " << solve_out << "\n";
      }
      if (!solve_vtk.empty()) {
        export_vtk(sol, skel, solve_vtk);
        std::cout << "wrote " << solve_vtk << "\n";
      }
      return 0;
    }

    if (bench_cmd->parsed()) {
      std::vector<ExperimentReport> reports;
      std::cout << csv_header() << "\n";
      for (int level : bench_levels) {
        for (const std::string& mode : bench_modes) {
          for (double alpha : bench_alphas) {
            ExperimentConfig cfg;
            cfg.which = bench_which == "exp1" ? Experiment::exp1 : Experiment::exp2;
            cfg.alpha = alpha;
            cfg.level = level;
            cfg.mode = mode == "adapted" ? TraceMode::adapted : TraceMode::linear;
            cfg.run_grs = bench_grs;
            cfg.threads = bench_threads;
            if (!bench_vtk_dir.empty()) {
              std::ostringstream name;
              name << bench_vtk_dir << "/" << bench_which << "_l" << level << "_" << mode
                   << "_a" << alpha << ".vtk";
              cfg.vtk_path = name.str();
            }
            ExperimentReport rep = run_experiment(cfg);
            reports.push_back(rep);
            std::cout << csv_row(rep) << std::endl;
          }
        }
      }
      if (!bench_out.empty()) write_csv(reports, bench_out);
      return 0;
    }
  } catch (const Error& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
  return 0;
}
