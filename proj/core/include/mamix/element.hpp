// Degree-k Lagrange basis on the reference triangle and symmetric triangle
// quadrature with declared polynomial exactness.
#pragma once

#include <array>
#include <functional>
#include <vector>

#include "mamix/mesh.hpp"
#include "mamix/types.hpp"

namespace mamix {

class UnsupportedDegreeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Barycentric coordinate on the reference triangle; b0 + b1 + b2 = 1.
struct Bary {
  double b0 = 0, b1 = 0, b2 = 0;
  Bary() = default;
  Bary(double a, double b, double c) : b0(a), b1(b), b2(c) {}
  /// Reference coordinates (r, s) with vertices (0,0), (1,0), (0,1).
  double r() const { return b1; }
  double s() const { return b2; }
};

struct NodeRole {
  enum Kind { vertex, edge, interior } kind = interior;
  int which = 0;  ///< vertex id 0..2, edge id 0..2 (edge e joins vertices e and (e+1)%3), or interior counter
  int pos = 0;    ///< for edge nodes: 1..k-1 counted from vertex `which`
};

struct BasisEval {
  std::vector<double> values;
  std::vector<Vec2> gradients;  ///< in reference coordinates (d/dr, d/ds)
};

/// Lagrange element on the uniform lattice (i/k, j/k, m/k); Bernstein-backed
/// for conditioning of the nodal solve.
class ReferenceElement {
 public:
  static ReferenceElement create(int degree);

  int degree() const { return degree_; }
  int num_nodes() const { return static_cast<int>(nodes_.size()); }
  const std::vector<Bary>& nodes() const { return nodes_; }
  const std::vector<NodeRole>& node_roles() const { return roles_; }

  /// Values and reference-coordinate gradients of all nodal basis functions.
  /// The point must be a valid barycentric coordinate up to tolerance 1e-10.
  BasisEval eval_basis(const Bary& point) const;

 private:
  int degree_ = 0;
  std::vector<Bary> nodes_;
  std::vector<NodeRole> roles_;
  Eigen::MatrixXd coeffs_;  ///< column i: Bernstein coefficients of nodal basis i
};

struct QuadraturePoint {
  Bary point;
  double weight = 0;  ///< reference-area weight; weights sum to 1/2
};

struct QuadratureRule {
  std::vector<QuadraturePoint> points;
  int exactness_degree = 0;
};

/// Smallest tabulated symmetric rule with exactness >= min_exactness (cap 12).
QuadratureRule make_quadrature(int min_exactness);

/// Gauss-Legendre rule on [0,1]; weights sum to 1, exactness 2n-1.
struct LineQuadrature {
  std::vector<double> points;
  std::vector<double> weights;
  int exactness_degree = 0;
};
LineQuadrature make_line_quadrature(int min_exactness);

/// Elementwise Lagrange interpolation error of a smooth function, sampled at
/// quadrature points; one sup-norm value per mesh.
std::vector<double> interpolation_error_probe(const ReferenceElement& elem,
                                              const std::function<double(Vec2)>& fn,
                                              const std::vector<Mesh>& meshes);

}  // namespace mamix
