#include "mamix/assembly.hpp"

#include <Eigen/SparseCholesky>

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace mamix {

namespace {

/// Basis values/gradients tabulated at the points of a volume rule.
struct TabulatedBasis {
  std::vector<BasisEval> at;
  explicit TabulatedBasis(const ReferenceElement& elem, const QuadratureRule& quad) {
    at.reserve(quad.points.size());
    for (const auto& qp : quad.points) at.push_back(elem.eval_basis(qp.point));
  }
};

void require_shared_discretization(const ScalarSpace& vspace, const MatrixSpace& mspace) {
  if (&vspace.mesh() != &mspace.mesh() || vspace.degree() != mspace.degree())
    throw std::invalid_argument("assembly: scalar and matrix spaces must share mesh and degree");
}

void require_exactness(const QuadratureRule& quad, int needed, const char* what) {
  if (quad.exactness_degree < needed) {
    std::ostringstream os;
    os << what << ": quadrature exactness " << quad.exactness_degree << " is below the required "
       << needed;
    throw std::invalid_argument(os.str());
  }
}

void require_matrix_field(const MatrixSpace& mspace, const FieldVector& sigma) {
  if (sigma.kind != SpaceKind::matrix || sigma.coeffs.size() != mspace.num_dofs())
    throw std::invalid_argument("assembly: field is not a coefficient vector of the matrix space");
}

SymMat2 eval_sigma_local(const MatrixSpace& mspace, const FieldVector& sigma, int t,
                         const BasisEval& basis) {
  const ScalarSpace& s = mspace.scalar();
  SymMat2 value;
  for (int i = 0; i < s.nodes_per_element(); ++i) {
    const int d = s.dof(t, i);
    const double v = basis.values[i];
    value.xx += sigma.coeffs[mspace.dof(0, d)] * v;
    value.xy += sigma.coeffs[mspace.dof(1, d)] * v;
    value.yy += sigma.coeffs[mspace.dof(2, d)] * v;
  }
  return value;
}

}  // namespace

SparseMatrix assemble_mass(const MatrixSpace& space, const QuadratureRule& quad) {
  const ScalarSpace& s = space.scalar();
  require_exactness(quad, 2 * s.degree(), "assemble_mass");
  const Mesh& mesh = s.mesh();
  const int nloc = s.nodes_per_element();
  const TabulatedBasis tab(s.element(), quad);

  std::vector<SparseMatrix::Triplet> triplets;
  triplets.reserve(static_cast<size_t>(mesh.num_triangles()) * nloc * nloc * 3);
  Eigen::MatrixXd local(nloc, nloc);
  // Frobenius weights of the component basis matrices: e_xy : e_xy = 2.
  const double comp_weight[3] = {1.0, 2.0, 1.0};

  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const double scale = std::abs(mesh.element_map(t).det);
    local.setZero();
    for (size_t q = 0; q < quad.points.size(); ++q) {
      const double w = quad.points[q].weight * scale;
      const auto& vals = tab.at[q].values;
      for (int i = 0; i < nloc; ++i)
        for (int j = 0; j < nloc; ++j) local(i, j) += w * vals[i] * vals[j];
    }
    for (int c = 0; c < 3; ++c)
      for (int i = 0; i < nloc; ++i)
        for (int j = 0; j < nloc; ++j)
          triplets.emplace_back(space.dof(c, s.dof(t, i)), space.dof(c, s.dof(t, j)),
                                comp_weight[c] * local(i, j));
  }
  return SparseMatrix::from_triplets(space.num_dofs(), space.num_dofs(), triplets);
}

std::pair<SparseMatrix, SparseMatrix> assemble_divgrad(const ScalarSpace& vspace,
                                                       const MatrixSpace& mspace,
                                                       const QuadratureRule& quad) {
  require_shared_discretization(vspace, mspace);
  const int k = vspace.degree();
  require_exactness(quad, 2 * k, "assemble_divgrad");
  const Mesh& mesh = vspace.mesh();
  const ScalarSpace& s = mspace.scalar();
  const int nloc = vspace.nodes_per_element();
  const TabulatedBasis tab(vspace.element(), quad);

  const int n_int = static_cast<int>(vspace.interior_dofs().size());
  const int n_bdry = static_cast<int>(vspace.boundary_dofs().size());
  std::vector<SparseMatrix::Triplet> trip_int, trip_bdry;

  auto emit = [&](int row, int u_dof, double value) {
    const int ii = vspace.interior_index(u_dof);
    if (ii >= 0)
      trip_int.emplace_back(row, ii, value);
    else
      trip_bdry.emplace_back(row, vspace.boundary_index(u_dof), value);
  };

  std::vector<Vec2> grad(nloc);
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const ElementMap map = mesh.element_map(t);
    const double scale = std::abs(map.det);
    for (size_t q = 0; q < quad.points.size(); ++q) {
      const double w = quad.points[q].weight * scale;
      for (int i = 0; i < nloc; ++i) grad[i] = map.inv_t * tab.at[q].gradients[i];
      for (int i = 0; i < nloc; ++i) {    // tau = psi_i e_c
        const int sd = s.dof(t, i);
        for (int j = 0; j < nloc; ++j) {  // u basis phi_j
          const int ud = vspace.dof(t, j);
          emit(mspace.dof(0, sd), ud, w * grad[i].x() * grad[j].x());
          emit(mspace.dof(1, sd), ud, w * (grad[i].y() * grad[j].x() + grad[i].x() * grad[j].y()));
          emit(mspace.dof(2, sd), ud, w * grad[i].y() * grad[j].y());
        }
      }
    }
  }

  // Boundary term -<D u, tau n> with the element-side trace of D u.
  const LineQuadrature edge_rule = make_line_quadrature(2 * k);
  for (const auto& be : mesh.boundary_edges) {
    const int t = be.triangle;
    const ElementMap map = mesh.element_map(t);
    const Vec2 p0 = mesh.vertices[be.v0];
    const Vec2 p1 = mesh.vertices[be.v1];
    const double length = (p1 - p0).norm();
    const Vec2& n = be.normal;
    for (size_t q = 0; q < edge_rule.points.size(); ++q) {
      const Vec2 x = p0 + edge_rule.points[q] * (p1 - p0);
      const Vec2 rs = map.jacobian.inverse() * (x - map.origin);
      const Bary bary(1.0 - rs.x() - rs.y(), rs.x(), rs.y());
      const BasisEval basis = vspace.element().eval_basis(bary);
      const double w = edge_rule.weights[q] * length;
      for (int i = 0; i < nloc; ++i) grad[i] = map.inv_t * basis.gradients[i];
      for (int i = 0; i < nloc; ++i) {
        const int sd = s.dof(t, i);
        const double psi = basis.values[i];
        for (int j = 0; j < nloc; ++j) {
          const int ud = vspace.dof(t, j);
          emit(mspace.dof(0, sd), ud, -w * psi * grad[j].x() * n.x());
          emit(mspace.dof(1, sd), ud, -w * psi * (grad[j].x() * n.y() + grad[j].y() * n.x()));
          emit(mspace.dof(2, sd), ud, -w * psi * grad[j].y() * n.y());
        }
      }
    }
  }

  return {SparseMatrix::from_triplets(mspace.num_dofs(), n_int, trip_int),
          SparseMatrix::from_triplets(mspace.num_dofs(), n_bdry, trip_bdry)};
}

MixedOperator build_mixed_operator(const ScalarSpace& vspace, const MatrixSpace& mspace,
                                   const QuadratureRule& quad) {
  MixedOperator op;
  op.vspace = &vspace;
  op.mspace = &mspace;
  op.M = assemble_mass(mspace, quad);
  auto [bi, bb] = assemble_divgrad(vspace, mspace, quad);
  op.B_int = std::move(bi);
  op.B_bdry = std::move(bb);
  op.quad = quad;
  return op;
}

FieldVector discrete_hessian(const MixedOperator& op, const FieldVector& u) {
  const ScalarSpace& vspace = *op.vspace;
  if (u.kind != SpaceKind::scalar || u.coeffs.size() != vspace.num_dofs())
    throw std::invalid_argument("discrete_hessian: field is not a scalar-space vector");

  Eigen::VectorXd u_int(vspace.interior_dofs().size());
  Eigen::VectorXd u_bdry(vspace.boundary_dofs().size());
  for (size_t i = 0; i < vspace.interior_dofs().size(); ++i)
    u_int[i] = u.coeffs[vspace.interior_dofs()[i]];
  for (size_t i = 0; i < vspace.boundary_dofs().size(); ++i)
    u_bdry[i] = u.coeffs[vspace.boundary_dofs()[i]];

  const Eigen::VectorXd rhs = -(op.B_int.apply(u_int) + op.B_bdry.apply(u_bdry));

  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> chol;
  chol.compute(Eigen::SparseMatrix<double>(op.M.storage()));
  if (chol.info() != Eigen::Success)
    throw FactorizationError("discrete_hessian: mass matrix factorization failed");
  FieldVector sigma;
  sigma.kind = SpaceKind::matrix;
  sigma.degree = op.mspace->degree();
  sigma.coeffs = chol.solve(rhs);
  return sigma;
}

Eigen::VectorXd assemble_residual(const ScalarSpace& vspace, const MatrixSpace& mspace,
                                  const FieldVector& sigma,
                                  const std::function<double(Vec2)>& f,
                                  const QuadratureRule& quad) {
  require_shared_discretization(vspace, mspace);
  require_exactness(quad, 3 * vspace.degree(), "assemble_residual");
  require_matrix_field(mspace, sigma);
  const Mesh& mesh = vspace.mesh();
  const int nloc = vspace.nodes_per_element();
  const TabulatedBasis tab(vspace.element(), quad);

  Eigen::VectorXd r = Eigen::VectorXd::Zero(vspace.interior_dofs().size());
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const ElementMap map = mesh.element_map(t);
    const double scale = std::abs(map.det);
    for (size_t q = 0; q < quad.points.size(); ++q) {
      const Bary& p = quad.points[q].point;
      const SymMat2 sig = eval_sigma_local(mspace, sigma, t, tab.at[q]);
      const Vec2 x = map.to_physical(p.r(), p.s());
      const double fval = f(x);
      if (!std::isfinite(fval)) {
        std::ostringstream os;
        os << "assemble_residual: non-finite f at (" << x.x() << ", " << x.y() << ")";
        throw EvaluationError(os.str());
      }
      const double w = quad.points[q].weight * scale * (sig.det() - fval);
      for (int i = 0; i < nloc; ++i) {
        const int ii = vspace.interior_index(vspace.dof(t, i));
        if (ii >= 0) r[ii] += w * tab.at[q].values[i];
      }
    }
  }
  return r;
}

SparseMatrix assemble_jacobian_block(const ScalarSpace& vspace, const MatrixSpace& mspace,
                                     const FieldVector& sigma, const QuadratureRule& quad) {
  require_shared_discretization(vspace, mspace);
  require_exactness(quad, 3 * vspace.degree(), "assemble_jacobian_block");
  require_matrix_field(mspace, sigma);
  const Mesh& mesh = vspace.mesh();
  const ScalarSpace& s = mspace.scalar();
  const int nloc = vspace.nodes_per_element();
  const TabulatedBasis tab(vspace.element(), quad);

  std::vector<SparseMatrix::Triplet> triplets;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const double scale = std::abs(mesh.element_map(t).det);
    for (size_t q = 0; q < quad.points.size(); ++q) {
      const SymMat2 cof = eval_sigma_local(mspace, sigma, t, tab.at[q]).cof();
      const double w = quad.points[q].weight * scale;
      const auto& vals = tab.at[q].values;
      for (int i = 0; i < nloc; ++i) {  // test function v
        const int row = vspace.interior_index(vspace.dof(t, i));
        if (row < 0) continue;
        for (int j = 0; j < nloc; ++j) {  // tau = psi_j e_c; cof : e_xy = 2 cof_xy
          const int sd = s.dof(t, j);
          const double base = w * vals[i] * vals[j];
          triplets.emplace_back(row, mspace.dof(0, sd), base * cof.xx);
          triplets.emplace_back(row, mspace.dof(1, sd), base * 2.0 * cof.xy);
          triplets.emplace_back(row, mspace.dof(2, sd), base * cof.yy);
        }
      }
    }
  }
  return SparseMatrix::from_triplets(static_cast<int>(vspace.interior_dofs().size()),
                                     mspace.num_dofs(), triplets);
}

SparseMatrix assemble_stiffness(const ScalarSpace& vspace, const QuadratureRule& quad) {
  require_exactness(quad, 2 * (vspace.degree() - 1), "assemble_stiffness");
  const Mesh& mesh = vspace.mesh();
  const int nloc = vspace.nodes_per_element();
  const TabulatedBasis tab(vspace.element(), quad);

  std::vector<SparseMatrix::Triplet> triplets;
  std::vector<Vec2> grad(nloc);
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const ElementMap map = mesh.element_map(t);
    const double scale = std::abs(map.det);
    for (size_t q = 0; q < quad.points.size(); ++q) {
      const double w = quad.points[q].weight * scale;
      for (int i = 0; i < nloc; ++i) grad[i] = map.inv_t * tab.at[q].gradients[i];
      for (int i = 0; i < nloc; ++i)
        for (int j = 0; j < nloc; ++j)
          triplets.emplace_back(vspace.dof(t, i), vspace.dof(t, j), w * grad[i].dot(grad[j]));
    }
  }
  return SparseMatrix::from_triplets(vspace.num_dofs(), vspace.num_dofs(), triplets);
}

Eigen::VectorXd assemble_load(const ScalarSpace& vspace, const std::function<double(Vec2)>& fn,
                              const QuadratureRule& quad) {
  const Mesh& mesh = vspace.mesh();
  const int nloc = vspace.nodes_per_element();
  const TabulatedBasis tab(vspace.element(), quad);

  Eigen::VectorXd r = Eigen::VectorXd::Zero(vspace.interior_dofs().size());
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const ElementMap map = mesh.element_map(t);
    const double scale = std::abs(map.det);
    for (size_t q = 0; q < quad.points.size(); ++q) {
      const Bary& p = quad.points[q].point;
      const Vec2 x = map.to_physical(p.r(), p.s());
      const double fval = fn(x);
      if (!std::isfinite(fval)) {
        std::ostringstream os;
        os << "assemble_load: non-finite integrand at (" << x.x() << ", " << x.y() << ")";
        throw EvaluationError(os.str());
      }
      const double w = quad.points[q].weight * scale * fval;
      for (int i = 0; i < nloc; ++i) {
        const int ii = vspace.interior_index(vspace.dof(t, i));
        if (ii >= 0) r[ii] += w * tab.at[q].values[i];
      }
    }
  }
  return r;
}

ConvexityReport check_convexity(const MatrixSpace& mspace, const FieldVector& sigma,
                                const QuadratureRule& quad) {
  std::vector<int> all(mspace.mesh().num_triangles());
  for (size_t t = 0; t < all.size(); ++t) all[t] = static_cast<int>(t);
  return check_convexity(mspace, sigma, quad, all);
}

ConvexityReport check_convexity(const MatrixSpace& mspace, const FieldVector& sigma,
                                const QuadratureRule& quad, const std::vector<int>& triangles) {
  require_matrix_field(mspace, sigma);
  const ScalarSpace& s = mspace.scalar();
  const TabulatedBasis tab(s.element(), quad);

  ConvexityReport report;
  report.min_lambda1 = std::numeric_limits<double>::infinity();
  report.max_lambda2 = -std::numeric_limits<double>::infinity();
  for (int t : triangles) {
    bool nonconvex = false;
    for (size_t q = 0; q < quad.points.size(); ++q) {
      const auto [l1, l2] = eval_sigma_local(mspace, sigma, t, tab.at[q]).eigenvalues();
      report.min_lambda1 = std::min(report.min_lambda1, l1);
      report.max_lambda2 = std::max(report.max_lambda2, l2);
      if (l1 <= 0.0) nonconvex = true;
    }
    if (nonconvex) report.nonconvex_triangles.push_back(t);
  }
  return report;
}

}  // namespace mamix
