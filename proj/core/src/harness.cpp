#include "mamix/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace mamix {

namespace {

std::string fmt17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

bool is_axis_aligned_rectangle(const std::vector<Vec2>& polygon, Rect& rect) {
  if (polygon.size() != 4) return false;
  double xmin = polygon[0].x(), xmax = xmin, ymin = polygon[0].y(), ymax = ymin;
  for (const auto& p : polygon) {
    xmin = std::min(xmin, p.x());
    xmax = std::max(xmax, p.x());
    ymin = std::min(ymin, p.y());
    ymax = std::max(ymax, p.y());
  }
  for (const auto& p : polygon) {
    const bool on_x = (p.x() == xmin || p.x() == xmax);
    const bool on_y = (p.y() == ymin || p.y() == ymax);
    if (!on_x || !on_y) return false;
  }
  rect = {xmin, ymin, xmax, ymax};
  return true;
}

}  // namespace

ErrorReport error_norms(const ScalarSpace& vspace, const MatrixSpace& mspace,
                        const FieldVector& u_h, const FieldVector& sigma_h,
                        const std::function<double(Vec2)>& exact_u,
                        const std::function<SymMat2(Vec2)>& exact_hessian,
                        const QuadratureRule& quad, const InteriorRegion& interior) {
  const int k = vspace.degree();
  if (quad.exactness_degree < 2 * (k + 1))
    std::cerr << "warning: error_norms quadrature exactness " << quad.exactness_degree
              << " is below 2(k+1) = " << 2 * (k + 1) << "; errors may be under-resolved\n";

  const Mesh& mesh = vspace.mesh();
  ErrorReport report;
  report.h = mesh.mesh_size_h;
  report.ndof_u = vspace.num_dofs();
  report.ndof_sigma = mspace.num_dofs();

  std::vector<char> selected(mesh.num_triangles(), 0);
  for (int t : interior.selected_triangles) selected[t] = 1;

  double l2 = 0, h1semi = 0, sig_l2 = 0, sup = 0;
  bool any_interior = false;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const ElementMap map = mesh.element_map(t);
    const double scale = std::abs(map.det);
    for (const auto& qp : quad.points) {
      const double w = qp.weight * scale;
      const Vec2 x = map.to_physical(qp.point.r(), qp.point.s());
      if (exact_u) {
        const ScalarEval eval = eval_field(vspace, u_h, t, qp.point);
        const double diff = eval.value - exact_u(x);
        l2 += w * diff * diff;
        // exact gradient by small central differences only if no closed form:
        // the catalog always carries u; its gradient comes from the Hessian-free
        // directional difference below.
        if (selected[t]) {
          any_interior = true;
          sup = std::max(sup, std::abs(diff));
        }
        const double step = 1e-6;
        const Vec2 ex(step, 0), ey(0, step);
        const Vec2 grad_exact((exact_u(x + ex) - exact_u(x - ex)) / (2 * step),
                              (exact_u(x + ey) - exact_u(x - ey)) / (2 * step));
        h1semi += w * (eval.gradient - grad_exact).squaredNorm();
      }
      if (exact_hessian) {
        const MatrixEval eval = eval_field(mspace, sigma_h, t, qp.point);
        const SymMat2 diff = eval.value - exact_hessian(x);
        sig_l2 += w * diff.ddot(diff);
      }
    }
  }

  if (exact_u) {
    report.err_u_L2 = std::sqrt(l2);
    report.err_u_H1_semi = std::sqrt(h1semi);
    report.err_u_H1 = std::sqrt(l2 + h1semi);
    if (any_interior) report.err_u_sup_interior = sup;
  }
  if (exact_hessian) report.err_sigma_L2 = std::sqrt(sig_l2);
  return report;
}

double fit_rate(const std::vector<double>& h, const std::vector<double>& err) {
  if (h.size() != err.size() || h.size() < 2)
    throw std::invalid_argument("fit_rate: need at least two (h, error) pairs");
  const int n = static_cast<int>(h.size());
  double mx = 0, my = 0;
  for (int i = 0; i < n; ++i) {
    mx += std::log(h[i]);
    my += std::log(err[i]);
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    const double dx = std::log(h[i]) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(err[i]) - my);
  }
  if (sxx == 0) throw std::invalid_argument("fit_rate: mesh sizes are not distinct");
  return sxy / sxx;
}

void ConvergenceTable::write_csv(std::ostream& os) const {
  os << "h,ndof_u,ndof_sigma,err_u_L2,err_u_H1,err_sigma_L2,err_u_sup_interior,"
        "newton_iters,min_lambda1\n";
  for (const auto& r : rows) {
    os << fmt17(r.h) << ',' << r.ndof_u << ',' << r.ndof_sigma << ',' << fmt17(r.err_u_L2) << ','
       << fmt17(r.err_u_H1) << ',' << fmt17(r.err_sigma_L2) << ',' << fmt17(r.err_u_sup_interior)
       << ',' << r.newton_iters << ',' << fmt17(r.min_lambda1) << '\n';
  }
}

ConvergenceTable ConvergenceTable::read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw std::invalid_argument("convergence csv: empty input");
  ConvergenceTable table;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    ErrorReport r;
    if (!(ls >> r.h >> r.ndof_u >> r.ndof_sigma >> r.err_u_L2 >> r.err_u_H1 >> r.err_sigma_L2 >>
          r.err_u_sup_interior >> r.newton_iters >> r.min_lambda1))
      throw std::invalid_argument("convergence csv: bad row \"" + line + "\"");
    table.rows.push_back(r);
  }
  return table;
}

namespace {

RateSummary fit_column(const std::vector<const ErrorReport*>& converged,
                       double ErrorReport::*field) {
  RateSummary summary;
  std::vector<double> h, e;
  double max_err = 0;
  for (const auto* r : converged) {
    const double v = r->*field;
    if (!std::isfinite(v)) continue;
    max_err = std::max(max_err, v);
    h.push_back(r->h);
    e.push_back(v);
  }
  if (h.size() < 2) return summary;
  if (max_err <= 1e-10) {
    summary.exact_to_tolerance = true;
    return summary;
  }
  // rounding-level rows would corrupt the fit
  std::vector<double> hf, ef;
  for (size_t i = 0; i < h.size(); ++i)
    if (e[i] > 1e-14) {
      hf.push_back(h[i]);
      ef.push_back(e[i]);
    }
  if (hf.size() < 2) return summary;
  summary.least_squares = fit_rate(hf, ef);
  const size_t m = hf.size();
  summary.last_pair = std::log(ef[m - 2] / ef[m - 1]) / std::log(hf[m - 2] / hf[m - 1]);
  return summary;
}

void print_rate(std::ostream& os, const char* name, const RateSummary& r) {
  os << "  " << name << ": ";
  if (r.exact_to_tolerance)
    os << "exact (errors at rounding level)";
  else if (std::isfinite(r.least_squares))
    os << "fit " << r.least_squares << " (last pair " << r.last_pair << ")";
  else
    os << "unavailable";
  os << '\n';
}

}  // namespace

void ConvergenceTable::print_summary(std::ostream& os) const {
  os << "level   h            ndof_u   err_u_L2      err_u_H1      err_sigma_L2  "
        "sup_int       iters  min_l1\n";
  for (size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    char buf[200];
    std::snprintf(buf, sizeof buf, "%-7zu %-12.6g %-8d %-13.6g %-13.6g %-13.6g %-13.6g %-6d %.6g%s",
                  i, r.h, r.ndof_u, r.err_u_L2, r.err_u_H1, r.err_sigma_L2, r.err_u_sup_interior,
                  r.newton_iters, r.min_lambda1, r.solver_converged ? "" : "  [solver failed]");
    os << buf << '\n';
  }
  os << "rates (least-squares over converged levels):\n";
  print_rate(os, "u  H1", rate_u_H1);
  print_rate(os, "u  L2", rate_u_L2);
  print_rate(os, "sigma L2", rate_sigma_L2);
  print_rate(os, "u  sup interior", rate_sup);
  if (!rate_error.empty()) os << "  note: " << rate_error << '\n';
}

ProblemSpec resolve_problem(const std::string& label, const RunConfig& config) {
  ProblemSpec problem;
  try {
    problem = catalog(label);
  } catch (const std::invalid_argument&) {
    if (std::filesystem::exists(label))
      problem = load_problem_file(label);
    else
      throw;
  }
  if (std::isfinite(config.clip) || config.mollify_radius > 0.0) {
    const double ceiling =
        std::isfinite(config.clip) ? config.clip : std::numeric_limits<double>::max();
    problem = regularize(std::move(problem), ceiling, config.mollify_radius);
  }
  if (config.mollify_g > 0.0) problem = mollify_boundary(std::move(problem), config.mollify_g);
  return problem;
}

Mesh build_case_mesh(const ProblemSpec& problem, int n, const RunConfig& config) {
  if (!config.mesh_file.empty()) return read_mesh_file(config.mesh_file);
  Rect rect;
  if (is_axis_aligned_rectangle(problem.domain, rect)) return build_structured_mesh(rect, n);
  const int refinements = std::max(0, static_cast<int>(std::lround(std::log2(double(n)))));
  return build_polygon_mesh(problem.domain, refinements);
}

SolveArtifacts solve_single(const ProblemSpec& problem, int degree, const Mesh& mesh,
                            const RunConfig& config) {
  const int k = degree;
  const int exactness = std::max({3 * k, 2 * (k + 1), config.quad_degree});
  const QuadratureRule quad = make_quadrature(exactness);

  SolveArtifacts out;
  out.mesh = mesh;
  const ScalarSpace vspace = ScalarSpace::create(out.mesh, k);
  const MatrixSpace mspace = MatrixSpace::create(out.mesh, k);
  const MixedOperator op = build_mixed_operator(vspace, mspace, quad);

  ProblemSpec level_problem = problem;
  if (config.mollify_g_h > 0.0)
    level_problem = mollify_boundary(std::move(level_problem), config.mollify_g_h * mesh.mesh_size_h);

  const bool rescaled = config.beta != 1.0;
  const ProblemSpec solve_problem =
      rescaled ? apply_rescaling(level_problem, config.beta) : level_problem;

  try {
    out.newton = newton_solve(op, solve_problem, config.newton);
  } catch (const NewtonError& e) {
    // keep the best iterate so the row still carries measurable errors
    std::cerr << "solver: " << e.what() << '\n';
    out.newton = e.report();
  }
  if (rescaled) {
    out.newton.u.coeffs /= config.beta;
    out.newton.sigma.coeffs /= config.beta;
  }
  if (config.convexify_eps > 0.0) {
    ConvexifyConfig cc;
    cc.epsilon = config.convexify_eps;
    if (config.convexify_x0) {
      cc.x0 = *config.convexify_x0;
    } else {
      Vec2 c{0, 0};
      for (const auto& p : problem.domain) c += p;
      cc.x0 = c / double(problem.domain.size());
    }
    out.newton.u = apply_convexification(vspace, out.newton.u, cc);
    out.newton.sigma = discrete_hessian(op, out.newton.u);
  }

  const InteriorRegion interior = select_interior(out.mesh, config.interior_margin);
  out.report = error_norms(vspace, mspace, out.newton.u, out.newton.sigma, problem.exact_u,
                           problem.exact_hessian, quad, interior);
  out.report.newton_iters = out.newton.iterations;
  out.report.min_lambda1 = check_convexity(mspace, out.newton.sigma, quad).min_lambda1;
  if (!interior.empty_selection)
    out.report.min_lambda1_interior =
        check_convexity(mspace, out.newton.sigma, quad, interior.selected_triangles).min_lambda1;
  out.report.solver_converged = out.newton.converged;
  return out;
}

std::function<double(Vec2)> field_evaluator(const Mesh& mesh, int degree, const FieldVector& u) {
  auto mesh_copy = std::make_shared<Mesh>(mesh);
  auto space = std::make_shared<ScalarSpace>(ScalarSpace::create(*mesh_copy, degree));
  auto coeffs = std::make_shared<FieldVector>(u);
  return [mesh_copy, space, coeffs](Vec2 p) {
    const Mesh& m = *mesh_copy;
    int best_t = 0;
    double best_violation = std::numeric_limits<double>::infinity();
    Bary best_bary;
    for (int t = 0; t < m.num_triangles(); ++t) {
      const ElementMap map = m.element_map(t);
      const Vec2 rs = map.jacobian.inverse() * (p - map.origin);
      const Bary bary(1.0 - rs.x() - rs.y(), rs.x(), rs.y());
      const double violation = std::max({-bary.b0, -bary.b1, -bary.b2, 0.0});
      if (violation < best_violation) {
        best_violation = violation;
        best_t = t;
        best_bary = bary;
        if (violation == 0.0) break;
      }
    }
    // clamp slightly-outside points onto the closest triangle
    double b0 = std::max(best_bary.b0, 0.0), b1 = std::max(best_bary.b1, 0.0),
           b2 = std::max(best_bary.b2, 0.0);
    const double s = b0 + b1 + b2;
    return eval_field(*space, *coeffs, best_t, Bary(b0 / s, b1 / s, b2 / s)).value;
  };
}

ConvergenceTable run_convergence(const std::string& label, int degree, int levels,
                                 const RunConfig& config) {
  if (degree < 2)
    throw std::invalid_argument("run_convergence: degree must be >= 2 for the mixed method");
  if (levels < 2) throw std::invalid_argument("run_convergence: need at least 2 levels");

  const ProblemSpec problem = resolve_problem(label, config);
  ConvergenceTable table;
  Mesh mesh = build_case_mesh(problem, config.n, config);
  int converged_rows = 0;
  RunConfig level_config = config;
  SolveArtifacts previous;
  for (int level = 0; level < levels; ++level) {
    if (level > 0) {
      mesh = refine_uniform(mesh);
      if (config.nested) {
        level_config.newton.init = NewtonConfig::Init::interpolant;
        level_config.newton.init_function =
            field_evaluator(previous.mesh, degree, previous.newton.u);
      }
    }
    SolveArtifacts artifacts = solve_single(problem, degree, mesh, level_config);
    converged_rows += artifacts.report.solver_converged ? 1 : 0;
    table.rows.push_back(artifacts.report);
    if (config.nested) previous = std::move(artifacts);
  }

  std::vector<const ErrorReport*> converged;
  for (const auto& r : table.rows)
    if (r.solver_converged) converged.push_back(&r);
  if (converged.size() < 2) {
    table.rate_error = "rate unavailable: fewer than 2 converged levels";
  } else {
    table.rate_u_L2 = fit_column(converged, &ErrorReport::err_u_L2);
    table.rate_u_H1 = fit_column(converged, &ErrorReport::err_u_H1);
    table.rate_sigma_L2 = fit_column(converged, &ErrorReport::err_sigma_L2);
    table.rate_sup = fit_column(converged, &ErrorReport::err_u_sup_interior);
  }
  return table;
}

ErrorReport run_case(const std::string& label, int degree, int n, const RunConfig& config,
                     const std::string& out_dir) {
  const ProblemSpec problem = resolve_problem(label, config);
  const Mesh mesh = build_case_mesh(problem, n, config);
  SolveArtifacts artifacts = solve_single(problem, degree, mesh, config);

  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw std::runtime_error("run_case: cannot create output directory " + out_dir);
  auto open = [&](const std::string& name) {
    std::ofstream os(out_dir + "/" + name);
    if (!os) throw std::runtime_error("run_case: cannot write " + out_dir + "/" + name);
    return os;
  };

  {
    auto os = open("newton.csv");
    artifacts.newton.write_csv(os);
  }
  {
    auto os = open("u.txt");
    write_field_text(artifacts.newton.u, os);
  }
  {
    auto os = open("sigma.txt");
    write_field_text(artifacts.newton.sigma, os);
  }
  {
    auto os = open("mesh.txt");
    write_mesh_text(artifacts.mesh, os);
  }
  {
    // vertex dofs come first in the scalar dof order, so coefficients 0..nv-1
    // are the vertex values
    auto os = open("solution.dat");
    for (int v = 0; v < artifacts.mesh.num_vertices(); ++v) {
      os << fmt17(artifacts.mesh.vertices[v].x()) << ' ' << fmt17(artifacts.mesh.vertices[v].y())
         << ' ' << fmt17(artifacts.newton.u.coeffs[v]) << '\n';
    }
  }
  return artifacts.report;
}

}  // namespace mamix
