#include "mamix/solver.hpp"

#include <Eigen/SparseLU>

#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

namespace mamix {

void NewtonReport::write_csv(std::ostream& os) const {
  os << "iter,residual,min_lambda1,damping_halvings\n";
  char buf[96];
  for (size_t i = 0; i < residual_history.size(); ++i) {
    const int halvings = (i == 0) ? 0 : damping_halvings[i - 1];
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%d", i, residual_history[i],
                  min_lambda1_history[i], halvings);
    os << buf << '\n';
  }
}

Eigen::VectorXd solve_linear(const SparseMatrix& A, const Eigen::VectorXd& rhs) {
  if (A.rows() != A.cols()) throw std::invalid_argument("solve_linear: matrix must be square");
  if (rhs.size() != A.rows()) throw std::invalid_argument("solve_linear: size mismatch");

  Eigen::SparseMatrix<double> col_major(A.storage());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.analyzePattern(col_major);
  lu.factorize(col_major);
  if (lu.info() != Eigen::Success)
    throw FactorizationError("solve_linear: LU factorization failed: " + lu.lastErrorMessage());
  const Eigen::VectorXd x = lu.solve(rhs);

  const double resid = (A.apply(x) - rhs).norm();
  const double bound = 1e-10 * (A.max_abs() * x.norm() + rhs.norm());
  if (!(resid <= bound) && resid > 0)
    throw FactorizationError("solve_linear: residual " + std::to_string(resid) +
                             " exceeds the direct-solve bound " + std::to_string(bound));
  return x;
}

namespace {

struct ResidualParts {
  Eigen::VectorXd r1;  ///< M sigma + B u, over Sigma_h dofs
  Eigen::VectorXd r2;  ///< (det sigma - f, v), over interior V_h dofs
  double norm() const { return std::sqrt(r1.squaredNorm() + r2.squaredNorm()); }
};

Eigen::VectorXd gather(const Eigen::VectorXd& full, const std::vector<int>& dofs) {
  Eigen::VectorXd out(dofs.size());
  for (size_t i = 0; i < dofs.size(); ++i) out[i] = full[dofs[i]];
  return out;
}

ResidualParts evaluate_residual(const MixedOperator& op, const ProblemSpec& problem,
                                const Eigen::VectorXd& sigma, const Eigen::VectorXd& u_int,
                                const Eigen::VectorXd& b_bdry_term) {
  ResidualParts parts;
  parts.r1 = op.M.apply(sigma) + op.B_int.apply(u_int) + b_bdry_term;
  FieldVector sig;
  sig.kind = SpaceKind::matrix;
  sig.degree = op.mspace->degree();
  sig.coeffs = sigma;
  parts.r2 = assemble_residual(*op.vspace, *op.mspace, sig, problem.f, op.quad);
  return parts;
}

double min_lambda1_of(const MixedOperator& op, const Eigen::VectorXd& sigma) {
  FieldVector sig;
  sig.kind = SpaceKind::matrix;
  sig.degree = op.mspace->degree();
  sig.coeffs = sigma;
  return check_convexity(*op.mspace, sig, op.quad).min_lambda1;
}

/// Nodal eigenvalue clamp of a matrix field to the PSD cone.
Eigen::VectorXd project_psd_nodal(const MatrixSpace& mspace, const Eigen::VectorXd& sigma) {
  const int n = mspace.scalar().num_dofs();
  Eigen::VectorXd out = sigma;
  for (int d = 0; d < n; ++d) {
    SymMat2 m{sigma[mspace.dof(0, d)], sigma[mspace.dof(1, d)], sigma[mspace.dof(2, d)]};
    const auto [l1, l2] = m.eigenvalues();
    if (l1 >= 0.0) continue;
    // eigenvector for l1: (xy, l1 - xx) or (l1 - yy, xy), whichever is better conditioned
    Vec2 v;
    if (std::abs(m.xx - l1) >= std::abs(m.yy - l1))
      v = Vec2(m.xy, l1 - m.xx);
    else
      v = Vec2(l1 - m.yy, m.xy);
    const double norm = v.norm();
    if (norm > 0) {
      v /= norm;
      // subtract the negative eigenvalue's rank-one part
      m.xx -= l1 * v.x() * v.x();
      m.xy -= l1 * v.x() * v.y();
      m.yy -= l1 * v.y() * v.y();
    } else {
      m.xx -= l1;
      m.yy -= l1;
    }
    out[mspace.dof(0, d)] = m.xx;
    out[mspace.dof(1, d)] = m.xy;
    out[mspace.dof(2, d)] = m.yy;
  }
  return out;
}

}  // namespace

std::pair<FieldVector, FieldVector> initial_guess(const ProblemSpec& problem,
                                                  const MixedOperator& op,
                                                  const NewtonConfig& config) {
  const ScalarSpace& vspace = *op.vspace;
  const Mesh& mesh = vspace.mesh();

  FieldVector u;
  u.kind = SpaceKind::scalar;
  u.degree = vspace.degree();
  u.coeffs = Eigen::VectorXd::Zero(vspace.num_dofs());

  if (config.init == NewtonConfig::Init::interpolant) {
    const auto& fn = config.init_function ? config.init_function : problem.exact_u;
    if (!fn)
      throw std::invalid_argument(
          "initial_guess: interpolant strategy needs an init function or an exact solution");
    u = interpolate(vspace, fn);
    u = set_boundary_values(vspace, std::move(u), problem.g);
    return {u, discrete_hessian(op, u)};
  }

  // Poisson surrogate: det D^2 w = f with D^2 w = c I gives trace 2 sqrt(f).
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const ElementMap map = mesh.element_map(t);
    for (const auto& qp : op.quad.points) {
      const Vec2 x = map.to_physical(qp.point.r(), qp.point.s());
      const double fval = problem.f(x);
      if (fval < 0.0) {
        std::ostringstream os;
        os << "initial_guess: f is negative (" << fval << ") at quadrature point (" << x.x()
           << ", " << x.y() << ")";
        throw InvalidDataError(os.str());
      }
    }
  }

  u = set_boundary_values(vspace, std::move(u), problem.g);
  const SparseMatrix K = assemble_stiffness(vspace, op.quad);
  const Eigen::VectorXd load =
      assemble_load(vspace, [&](Vec2 p) { return 2.0 * std::sqrt(problem.f(p)); }, op.quad);

  // Split K into interior rows x (interior | boundary) columns.
  const auto& interior = vspace.interior_dofs();
  const int n_int = static_cast<int>(interior.size());
  std::vector<SparseMatrix::Triplet> trip_ii;
  Eigen::VectorXd rhs = -load;
  const auto& storage = K.storage();
  for (int row = 0; row < storage.outerSize(); ++row) {
    const int ri = vspace.interior_index(row);
    if (ri < 0) continue;
    for (SparseMatrix::Storage::InnerIterator it(storage, row); it; ++it) {
      const int ci = vspace.interior_index(static_cast<int>(it.col()));
      if (ci >= 0)
        trip_ii.emplace_back(ri, ci, it.value());
      else
        rhs[ri] -= it.value() * u.coeffs[it.col()];
    }
  }
  const SparseMatrix K_ii = SparseMatrix::from_triplets(n_int, n_int, trip_ii);
  const Eigen::VectorXd w_int = solve_linear(K_ii, rhs);
  for (int i = 0; i < n_int; ++i) u.coeffs[interior[i]] = w_int[i];

  return {u, discrete_hessian(op, u)};
}

NewtonReport newton_solve(const MixedOperator& op, const ProblemSpec& problem,
                          const NewtonConfig& config) {
  auto [u0, sigma0] = initial_guess(problem, op, config);
  return newton_solve(op, problem, config, u0, sigma0);
}

NewtonReport newton_solve(const MixedOperator& op, const ProblemSpec& problem,
                          const NewtonConfig& config, const FieldVector& u0,
                          const FieldVector& sigma0) {
  if (config.max_iterations < 1)
    throw std::invalid_argument("newton_solve: max_iterations must be >= 1");
  const ScalarSpace& vspace = *op.vspace;
  const MatrixSpace& mspace = *op.mspace;
  const int n_sigma = mspace.num_dofs();
  const int n_int = static_cast<int>(vspace.interior_dofs().size());
  const int num_unknowns = n_sigma + n_int;
  const double tol = config.effective_tolerance(num_unknowns);

  FieldVector u = u0;
  Eigen::VectorXd sigma = sigma0.coeffs;
  Eigen::VectorXd u_int = gather(u.coeffs, vspace.interior_dofs());
  const Eigen::VectorXd b_bdry_term = op.B_bdry.apply(gather(u.coeffs, vspace.boundary_dofs()));

  // Lowest-residual iterate, reported when the tolerance is never reached.
  Eigen::VectorXd best_sigma_seen = sigma;
  Eigen::VectorXd best_u_seen;
  double best_norm_seen = std::numeric_limits<double>::infinity();

  auto make_report = [&](bool converged, int iterations, std::vector<double> res_hist,
                         std::vector<double> lam_hist, std::vector<int> halvings) {
    NewtonReport report;
    report.converged = converged;
    report.iterations = iterations;
    report.residual_history = std::move(res_hist);
    report.min_lambda1_history = std::move(lam_hist);
    report.damping_halvings = std::move(halvings);
    report.best_residual = best_norm_seen;
    report.u = u;
    for (int i = 0; i < n_int; ++i) report.u.coeffs[vspace.interior_dofs()[i]] = best_u_seen[i];
    report.sigma.kind = SpaceKind::matrix;
    report.sigma.degree = mspace.degree();
    report.sigma.coeffs = best_sigma_seen;
    return report;
  };

  ResidualParts parts = evaluate_residual(op, problem, sigma, u_int, b_bdry_term);
  double norm = parts.norm();
  best_norm_seen = norm;
  best_u_seen = u_int;
  std::vector<double> res_hist{norm};
  std::vector<double> lam_hist{min_lambda1_of(op, sigma)};
  std::vector<int> halvings_hist;

  int growth_streak = 0;
  int iter = 0;
  while (norm > tol && iter < config.max_iterations) {
    // Block Jacobian [[M, B_int], [C(sigma), 0]].
    FieldVector sig;
    sig.kind = SpaceKind::matrix;
    sig.degree = mspace.degree();
    sig.coeffs = config.project_jacobian ? project_psd_nodal(mspace, sigma) : sigma;
    const SparseMatrix C = assemble_jacobian_block(vspace, mspace, sig, op.quad);

    std::vector<SparseMatrix::Triplet> trip;
    trip.reserve(op.M.nonzeros() + op.B_int.nonzeros() + C.nonzeros());
    auto add_block = [&trip](const SparseMatrix& m, int row0, int col0) {
      const auto& st = m.storage();
      for (int r = 0; r < st.outerSize(); ++r)
        for (SparseMatrix::Storage::InnerIterator it(st, r); it; ++it)
          trip.emplace_back(row0 + static_cast<int>(it.row()), col0 + static_cast<int>(it.col()),
                            it.value());
    };
    add_block(op.M, 0, 0);
    add_block(op.B_int, 0, n_sigma);
    add_block(C, n_sigma, 0);
    const SparseMatrix J = SparseMatrix::from_triplets(num_unknowns, num_unknowns, trip);

    Eigen::SparseMatrix<double> J_col(J.storage());
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.analyzePattern(J_col);
    lu.factorize(J_col);
    if (lu.info() != Eigen::Success)
      throw NewtonError(std::string("newton_solve: singular Jacobian at iteration ") +
                            std::to_string(iter) + ": " + lu.lastErrorMessage(),
                        make_report(false, iter, res_hist, lam_hist, halvings_hist));

    Eigen::VectorXd rhs(num_unknowns);
    rhs.head(n_sigma) = -parts.r1;
    rhs.tail(n_int) = -parts.r2;
    const Eigen::VectorXd delta = lu.solve(rhs);

    const bool natural = config.acceptance == NewtonConfig::Acceptance::natural;
    auto step_metric = [&](const ResidualParts& p) {
      if (!natural) return p.norm();
      Eigen::VectorXd r(num_unknowns);
      r.head(n_sigma) = p.r1;
      r.tail(n_int) = p.r2;
      return double(lu.solve(r).norm());
    };
    const double current_metric = natural ? delta.norm() : norm;

    // Halving line search; if no step length decreases the acceptance metric,
    // the best trial is taken and counted toward divergence.
    double alpha = 1.0;
    int used_halvings = 0;
    Eigen::VectorXd best_sigma, best_u;
    ResidualParts best_parts;
    double best_metric = std::numeric_limits<double>::infinity();
    bool decreased = false;
    const int allowed = config.damping ? config.max_halvings : 0;
    for (int h = 0; h <= allowed; ++h) {
      const Eigen::VectorXd trial_sigma = sigma + alpha * delta.head(n_sigma);
      const Eigen::VectorXd trial_u = u_int + alpha * delta.tail(n_int);
      ResidualParts trial_parts = evaluate_residual(op, problem, trial_sigma, trial_u, b_bdry_term);
      const double trial_metric = step_metric(trial_parts);
      if (trial_metric < best_metric) {
        best_metric = trial_metric;
        best_sigma = trial_sigma;
        best_u = trial_u;
        best_parts = std::move(trial_parts);
        used_halvings = h;
      }
      if (trial_metric < current_metric) {
        decreased = true;
        break;
      }
      alpha *= 0.5;
    }

    sigma = std::move(best_sigma);
    u_int = std::move(best_u);
    parts = std::move(best_parts);
    norm = parts.norm();
    if (norm < best_norm_seen) {
      best_norm_seen = norm;
      best_sigma_seen = sigma;
      best_u_seen = u_int;
    }
    ++iter;
    res_hist.push_back(norm);
    lam_hist.push_back(min_lambda1_of(op, sigma));
    halvings_hist.push_back(used_halvings);

    if (decreased) {
      growth_streak = 0;
    } else if (++growth_streak >= config.divergence_streak) {
      std::ostringstream os;
      os << "newton_solve: residual grew over " << growth_streak
         << " consecutive damped steps (last residual " << norm << ")";
      throw DivergenceError(os.str(), make_report(false, iter, res_hist, lam_hist, halvings_hist));
    }
  }

  return make_report(norm <= tol, iter, res_hist, lam_hist, halvings_hist);
}

ProblemSpec apply_rescaling(const ProblemSpec& problem, double beta) {
  if (!(beta > 0.0)) throw std::invalid_argument("apply_rescaling: beta must be positive");
  ProblemSpec scaled = problem;
  const auto f = problem.f;
  const auto g = problem.g;
  scaled.f = [f, beta](Vec2 p) { return beta * beta * f(p); };
  scaled.g = [g, beta](Vec2 p) { return beta * g(p); };
  if (problem.exact_u) {
    const auto u = problem.exact_u;
    scaled.exact_u = [u, beta](Vec2 p) { return beta * u(p); };
  }
  if (problem.exact_hessian) {
    const auto hess = problem.exact_hessian;
    scaled.exact_hessian = [hess, beta](Vec2 p) { return hess(p) * beta; };
  }
  if (std::isfinite(problem.clip_ceiling)) scaled.clip_ceiling = beta * beta * problem.clip_ceiling;
  return scaled;
}

FieldVector apply_convexification(const ScalarSpace& space, const FieldVector& u,
                                  const ConvexifyConfig& config) {
  if (config.epsilon < 0.0)
    throw std::invalid_argument("apply_convexification: epsilon must be >= 0");
  if (u.kind != SpaceKind::scalar || u.coeffs.size() != space.num_dofs())
    throw std::invalid_argument("apply_convexification: field is not a scalar-space vector");
  if (config.epsilon == 0.0) return u;
  const Vec2 x0 = config.x0;
  const double eps = config.epsilon;
  const FieldVector bump =
      interpolate(space, [x0, eps](Vec2 p) { return eps * (p - x0).squaredNorm(); });
  FieldVector out = u;
  out.coeffs += bump.coeffs;
  return out;
}

}  // namespace mamix
