// Assembly of the mixed system: mass form on Sigma_h, the combined
// divergence/boundary form coupling Sigma_h to V_h, the determinant residual,
// and the cofactor-linearized Jacobian block.
#pragma once

#include <functional>
#include <utility>

#include "mamix/element.hpp"
#include "mamix/mesh.hpp"
#include "mamix/spaces.hpp"
#include "mamix/sparse.hpp"

namespace mamix {

/// Assembled linear blocks of the mixed system, M sigma + B_int u_int +
/// B_bdry u_bdry = 0 (rows over all Sigma_h dofs).
struct MixedOperator {
  const ScalarSpace* vspace = nullptr;
  const MatrixSpace* mspace = nullptr;
  SparseMatrix M;       ///< mass matrix on Sigma_h, SPD
  SparseMatrix B_int;   ///< columns over interior V_h dofs
  SparseMatrix B_bdry;  ///< columns over boundary V_h dofs
  QuadratureRule quad;  ///< volume rule used for the nonlinear terms
};

/// (i, j) = integral of (basis matrix field j) : (basis matrix field i).
/// Requires quadrature exactness >= 2k.
SparseMatrix assemble_mass(const MatrixSpace& space, const QuadratureRule& quad);

/// Entries integral (div tau) . (D v_u) dx - boundary integral (D v_u) . (tau n) ds,
/// rows over Sigma_h dofs, columns split into interior / boundary V_h dofs.
/// Boundary edges use 1D Gauss rules of exactness >= 2k.
std::pair<SparseMatrix, SparseMatrix> assemble_divgrad(const ScalarSpace& vspace,
                                                       const MatrixSpace& mspace,
                                                       const QuadratureRule& quad);

MixedOperator build_mixed_operator(const ScalarSpace& vspace, const MatrixSpace& mspace,
                                   const QuadratureRule& quad);

/// Solves M sigma = -(B_int u_int + B_bdry u_bdry): the weak Hessian of u.
FieldVector discrete_hessian(const MixedOperator& op, const FieldVector& u);

/// Entry v = integral (det sigma - f) v dx over interior scalar basis functions.
/// Requires quadrature exactness >= 3k.
Eigen::VectorXd assemble_residual(const ScalarSpace& vspace, const MatrixSpace& mspace,
                                  const FieldVector& sigma,
                                  const std::function<double(Vec2)>& f,
                                  const QuadratureRule& quad);

/// Entry (v, tau) = integral (cof sigma) : tau v dx; rows over interior V_h
/// dofs, columns over Sigma_h dofs. The derivative of the determinant residual.
SparseMatrix assemble_jacobian_block(const ScalarSpace& vspace, const MatrixSpace& mspace,
                                     const FieldVector& sigma, const QuadratureRule& quad);

/// Gradient-gradient (stiffness) matrix on V_h over all dofs; used by the
/// Poisson initialization.
SparseMatrix assemble_stiffness(const ScalarSpace& vspace, const QuadratureRule& quad);

/// Load vector: integral of fn * v over interior V_h basis functions.
Eigen::VectorXd assemble_load(const ScalarSpace& vspace, const std::function<double(Vec2)>& fn,
                              const QuadratureRule& quad);

struct ConvexityReport {
  double min_lambda1 = 0;
  double max_lambda2 = 0;
  std::vector<int> nonconvex_triangles;  ///< triangles with lambda1 <= 0 at some point
};

/// Closed-form symmetric 2x2 eigenvalue extremes over all quadrature points.
ConvexityReport check_convexity(const MatrixSpace& mspace, const FieldVector& sigma,
                                const QuadratureRule& quad);

/// Same, restricted to a set of triangles (compact-subset convexity monitor).
ConvexityReport check_convexity(const MatrixSpace& mspace, const FieldVector& sigma,
                                const QuadratureRule& quad, const std::vector<int>& triangles);

}  // namespace mamix
