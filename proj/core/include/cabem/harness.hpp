#pragma once

#include "cabem/assemble.hpp"
#include "cabem/auxtri.hpp"
#include "cabem/trace.hpp"
#include "cabem/types.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace cabem {

/// Skeletal solution: basis coefficients at the mesh nodes and the evaluated
/// piecewise-linear values at every auxiliary node of the skeleton.
struct SkeletalSolution {
  VecX coefficients;
  VecX aux_values;
};

SkeletalSolution evaluate_solution(const VecX& coefficients, const PolyMesh& mesh,
                                   const SkeletonMesh& skel, const BasisTraces& traces);

/// Exact min/max of the solution over all auxiliary nodes of the skeleton.
std::pair<double, double> max_principle_check(const SkeletalSolution& sol,
                                              const SkeletonMesh& skel);

enum class Experiment { exp1, exp2 };

struct ExperimentConfig {
  Experiment which = Experiment::exp1;
  double alpha = 1e-1;
  int level = 2;
  TraceMode mode = TraceMode::adapted;
  bool run_plain = true; // unpreconditioned GMRES
  bool run_grs = false;
  double tol = 1e-6;
  QuadratureOrders quadrature;
  bool use_lookup = true;
  int threads = 0;
  int cube_n = 8;
  std::optional<std::string> vtk_path;
};

struct ExperimentReport {
  double alpha = 0.0;
  double pe_h = 0.0;
  int level = 0;
  TraceMode mode = TraceMode::adapted;
  double u_min = 0.0, u_max = 0.0;
  int iters_plain = -1;
  int iters_grs = -1;
  double wall_seconds = 0.0;
  Index n_interior = 0;
  LookupStats stats;

  /// The operational reading of "maximum principle holds": u within
  /// [g_min - 0.02, g_max + 0.02] for data bounded by [0, 3].
  bool band_holds() const { return u_min >= -0.02 && u_max <= 3.02; }
};

/// Builds the experiment mesh (cube for exp1, prism preset for exp2), runs
/// the full pipeline at the given diffusion and level, and reports extrema
/// over the skeleton plus GMRES iteration counts.
ExperimentReport run_experiment(const ExperimentConfig& config);

std::string csv_header();
std::string csv_row(const ExperimentReport& r);
void write_csv(std::span<const ExperimentReport> reports, const std::string& path);

/// Legacy ASCII VTK unstructured grid of the skeleton triangulation with the
/// solution as point data. Deterministic: identical input produces identical
/// bytes.
void export_vtk(const SkeletalSolution& sol, const SkeletonMesh& skel, const std::string& path);

/// Skeleton only (no solution), for inspection of the auxiliary meshes.
void export_skeleton_vtk(const SkeletonMesh& skel, const std::string& path);

/// Basis trace of one mesh node on one face as VTK point data.
void export_basis_vtk(const PolyMesh& mesh, const SkeletonMesh& skel, const BasisTraces& traces,
                      Index face, Index node, const std::string& path);

void save_solution_json(const SkeletalSolution& sol, const SkeletonMesh& skel,
                        const std::string& path);

/// Dirichlet data of the experiments.
double exp1_dirichlet(const Vec3& x);
double exp2_dirichlet(const Vec3& x);

} // namespace cabem
