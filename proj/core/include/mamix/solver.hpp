// Newton's method on the coupled mixed system with halving line search,
// Poisson-surrogate initialization, beta-rescaling and epsilon-convexification
// devices, and the sparse direct linear solve.
#pragma once

#include <iosfwd>
#include <optional>

#include "mamix/assembly.hpp"
#include "mamix/problems.hpp"
#include "mamix/spaces.hpp"
#include "mamix/sparse.hpp"

namespace mamix {

class InvalidDataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct NewtonConfig {
  double tolerance = 0.0;  ///< absolute, on the combined residual; 0 selects 1e-10 * sqrt(#unknowns)
  int max_iterations = 50;
  bool damping = true;  ///< halving line search; a full step is always tried first
  int max_halvings = 8;
  int divergence_streak = 4;  ///< consecutive residual-growing steps before giving up
  /// Step acceptance norm: the combined residual, or Deuflhard's natural norm
  /// ||J_k^{-1} r|| (one extra back-substitution per trial, crosses residual
  /// humps that stall the plain line search on degenerate problems).
  enum class Acceptance { residual, natural } acceptance = Acceptance::residual;
  /// Build the Jacobian from the positive-semidefinite projection of sigma
  /// (nodal eigenvalue clamp). Keeps the linearized operator elliptic away
  /// from convexity; identical to plain Newton once the iterate is convex.
  bool project_jacobian = true;
  enum class Init { poisson, interpolant } init = Init::poisson;
  std::function<double(Vec2)> init_function;  ///< convex start for the interpolant strategy

  double effective_tolerance(int num_unknowns) const {
    return tolerance > 0.0 ? tolerance : 1e-10 * std::sqrt(double(num_unknowns));
  }
};

struct NewtonReport {
  int iterations = 0;
  std::vector<double> residual_history;     ///< length iterations + 1
  std::vector<double> min_lambda1_history;  ///< length iterations + 1
  std::vector<int> damping_halvings;        ///< per accepted step
  bool converged = false;
  /// When the iteration stops without reaching the tolerance, (u, sigma) hold
  /// the lowest-residual iterate seen, not the last one.
  FieldVector u;
  FieldVector sigma;
  double best_residual = 0.0;  ///< residual norm at the reported iterate

  /// CSV rows: iter,residual,min_lambda1,damping_halvings
  void write_csv(std::ostream& os) const;
};

class NewtonError : public std::runtime_error {
 public:
  NewtonError(const std::string& msg, NewtonReport report)
      : std::runtime_error(msg), report_(std::move(report)) {}
  const NewtonReport& report() const { return report_; }

 private:
  NewtonReport report_;
};

class DivergenceError : public NewtonError {
 public:
  using NewtonError::NewtonError;
};

struct RescaleConfig {
  double beta = 1.0;
};

struct ConvexifyConfig {
  double epsilon = 0.0;
  Vec2 x0{0, 0};
};

/// Sparse LU with partial pivoting; verifies the residual bound
/// ||Ax - b|| <= 1e-10 (||A||_max ||x|| + ||b||).
Eigen::VectorXd solve_linear(const SparseMatrix& A, const Eigen::VectorXd& rhs);

/// Default start: u0 solves the Poisson surrogate (Laplace w = 2 sqrt(f),
/// w = g on the boundary) and sigma0 is its weak Hessian, so the pair starts
/// inside Z_h. Requires f >= 0 at the quadrature points.
std::pair<FieldVector, FieldVector> initial_guess(const ProblemSpec& problem,
                                                  const MixedOperator& op,
                                                  const NewtonConfig& config = {});

NewtonReport newton_solve(const MixedOperator& op, const ProblemSpec& problem,
                          const NewtonConfig& config);

/// Newton from an explicit initial pair; the pair need not lie in Z_h (the
/// linear block is restored by the first full step).
NewtonReport newton_solve(const MixedOperator& op, const ProblemSpec& problem,
                          const NewtonConfig& config, const FieldVector& u0,
                          const FieldVector& sigma0);

/// det D^2 (beta u) = beta^2 f in 2D: scales f, g and the exact data.
ProblemSpec apply_rescaling(const ProblemSpec& problem, double beta);

/// u + I_h(eps |x - x0|^2).
FieldVector apply_convexification(const ScalarSpace& space, const FieldVector& u,
                                  const ConvexifyConfig& config);

}  // namespace mamix
