// Error norms (L2, H1, broken, interior sup), refinement studies with rate
// fits, and the drivers behind the command line interface.
#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "mamix/assembly.hpp"
#include "mamix/problems.hpp"
#include "mamix/solver.hpp"

namespace mamix {

/// Per-mesh results; error fields are NaN when no exact data is available.
struct ErrorReport {
  double h = 0;
  int ndof_u = 0;
  int ndof_sigma = 0;
  double err_u_L2 = std::numeric_limits<double>::quiet_NaN();
  double err_u_H1 = std::numeric_limits<double>::quiet_NaN();
  double err_u_H1_semi = std::numeric_limits<double>::quiet_NaN();  ///< not serialized
  double err_sigma_L2 = std::numeric_limits<double>::quiet_NaN();
  double err_u_sup_interior = std::numeric_limits<double>::quiet_NaN();
  int newton_iters = 0;
  double min_lambda1 = 0;
  /// over the interior region only; not serialized
  double min_lambda1_interior = std::numeric_limits<double>::quiet_NaN();
  bool solver_converged = false;
};

/// Broken-norm errors by elementwise quadrature; the sup error is sampled at
/// quadrature points of the selected interior triangles only. Warns on
/// quadrature exactness below 2(k+1).
ErrorReport error_norms(const ScalarSpace& vspace, const MatrixSpace& mspace,
                        const FieldVector& u_h, const FieldVector& sigma_h,
                        const std::function<double(Vec2)>& exact_u,
                        const std::function<SymMat2(Vec2)>& exact_hessian,
                        const QuadratureRule& quad, const InteriorRegion& interior);

struct RunConfig {
  int n = 4;              ///< subdivisions of the coarsest mesh
  int quad_degree = 0;    ///< 0 selects max(3k, 2(k+1))
  NewtonConfig newton;
  double beta = 1.0;
  double convexify_eps = 0.0;
  std::optional<Vec2> convexify_x0;  ///< defaults to the domain centroid
  double clip = std::numeric_limits<double>::infinity();
  double mollify_radius = 0.0;    ///< mollification radius for f
  double mollify_g = 0.0;         ///< boundary-data mollification radius
  double mollify_g_h = 0.0;       ///< per-level boundary mollification, radius = factor * h
  double interior_margin = 0.0;
  std::string mesh_file;  ///< replaces the built coarsest mesh
  /// Warm-start each refinement level from the previous level's solution
  /// (meaningful when the problem data is fixed across levels).
  bool nested = false;
};

/// Least-squares slope of log(error) against log(h); needs >= 2 points.
double fit_rate(const std::vector<double>& h, const std::vector<double>& err);

struct RateSummary {
  double least_squares = std::numeric_limits<double>::quiet_NaN();
  double last_pair = std::numeric_limits<double>::quiet_NaN();
  bool exact_to_tolerance = false;  ///< all errors at rounding level; no rate meaningful
};

struct ConvergenceTable {
  std::vector<ErrorReport> rows;  ///< strictly decreasing h
  RateSummary rate_u_L2, rate_u_H1, rate_sigma_L2, rate_sup;
  std::string rate_error;  ///< non-empty when fewer than 2 rows converged

  /// Header: h,ndof_u,ndof_sigma,err_u_L2,err_u_H1,err_sigma_L2,
  /// err_u_sup_interior,newton_iters,min_lambda1
  void write_csv(std::ostream& os) const;
  static ConvergenceTable read_csv(std::istream& is);

  void print_summary(std::ostream& os) const;
};

/// Catalog label or path to a problem file, with the configured clipping and
/// mollification applied.
ProblemSpec resolve_problem(const std::string& label, const RunConfig& config);

/// Solve on one mesh: regularized problem, optional beta-rescaling (undone on
/// the returned fields) and epsilon-convexification of the result.
struct SolveArtifacts {
  Mesh mesh;
  NewtonReport newton;
  ErrorReport report;
};
SolveArtifacts solve_single(const ProblemSpec& problem, int degree, const Mesh& mesh,
                            const RunConfig& config);

/// Point evaluator of a scalar field for use on other meshes (triangle lookup
/// by linear scan); clamps points onto the mesh's domain.
std::function<double(Vec2)> field_evaluator(const Mesh& mesh, int degree, const FieldVector& u);

/// Refinement study: coarsest mesh from config, each level one uniform
/// refinement of the previous; solver failures are recorded per row and rates
/// are fitted over the converged rows.
ConvergenceTable run_convergence(const std::string& label, int degree, int levels,
                                 const RunConfig& config);

/// One solve plus artifacts in out_dir: newton.csv, u.txt, sigma.txt, and
/// solution.dat (x y u_h at mesh vertices).
ErrorReport run_case(const std::string& label, int degree, int n, const RunConfig& config,
                     const std::string& out_dir);

Mesh build_case_mesh(const ProblemSpec& problem, int n, const RunConfig& config);

}  // namespace mamix
