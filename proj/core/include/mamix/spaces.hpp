// Global scalar space V_h and symmetric-matrix space Sigma_h on a mesh:
// dof maps, boundary dof sets, Lagrange interpolation and field evaluation.
#pragma once

#include <functional>
#include <iosfwd>
#include <vector>

#include "mamix/element.hpp"
#include "mamix/mesh.hpp"
#include "mamix/types.hpp"

namespace mamix {

enum class SpaceKind { scalar, matrix };

/// Continuous degree-k Lagrange space. Global dof order: vertices, then edge
/// dofs by sorted edge-vertex pairs, then interior dofs by triangle index.
class ScalarSpace {
 public:
  static ScalarSpace create(const Mesh& mesh, int degree);

  const Mesh& mesh() const { return *mesh_; }
  const ReferenceElement& element() const { return element_; }
  int degree() const { return element_.degree(); }
  int num_dofs() const { return num_dofs_; }
  int num_edges() const { return num_edges_; }

  /// Global dof of local node `i` on triangle `t`.
  int dof(int t, int i) const { return element_dofs_[t * nodes_per_element_ + i]; }
  int nodes_per_element() const { return nodes_per_element_; }

  const std::vector<Vec2>& dof_points() const { return dof_points_; }
  const std::vector<int>& boundary_dofs() const { return boundary_dofs_; }
  const std::vector<int>& interior_dofs() const { return interior_dofs_; }
  bool is_boundary_dof(int dof) const { return boundary_index_[dof] >= 0; }
  /// Position of a dof within the interior (resp. boundary) list, or -1.
  int interior_index(int dof) const { return interior_index_[dof]; }
  int boundary_index(int dof) const { return boundary_index_[dof]; }

 private:
  const Mesh* mesh_ = nullptr;
  ReferenceElement element_;
  int num_dofs_ = 0;
  int num_edges_ = 0;
  int nodes_per_element_ = 0;
  std::vector<int> element_dofs_;
  std::vector<Vec2> dof_points_;
  std::vector<int> boundary_dofs_;
  std::vector<int> interior_dofs_;
  std::vector<int> interior_index_;
  std::vector<int> boundary_index_;
};

/// Symmetric 2x2 matrix fields with components in the scalar space; component-
/// major dof layout [xx | xy | yy], storing the off-diagonal entry once.
class MatrixSpace {
 public:
  static MatrixSpace create(const Mesh& mesh, int degree);

  const ScalarSpace& scalar() const { return scalar_; }
  const Mesh& mesh() const { return scalar_.mesh(); }
  int degree() const { return scalar_.degree(); }
  int num_dofs() const { return 3 * scalar_.num_dofs(); }

  /// Global dof of component c in {0:xx, 1:xy, 2:yy} for a scalar dof.
  int dof(int component, int scalar_dof) const {
    return component * scalar_.num_dofs() + scalar_dof;
  }

 private:
  ScalarSpace scalar_;
};

/// Coefficient vector of a finite element function.
struct FieldVector {
  SpaceKind kind = SpaceKind::scalar;
  int degree = 1;
  Eigen::VectorXd coeffs;
};

FieldVector interpolate(const ScalarSpace& space, const std::function<double(Vec2)>& fn);
FieldVector interpolate_matrix(const MatrixSpace& space, const std::function<SymMat2(Vec2)>& fn);

struct ScalarEval {
  double value = 0;
  Vec2 gradient{0, 0};  ///< physical coordinates
};
ScalarEval eval_field(const ScalarSpace& space, const FieldVector& u, int triangle,
                      const Bary& point);

struct MatrixEval {
  SymMat2 value;
  Vec2 grad_xx{0, 0}, grad_xy{0, 0}, grad_yy{0, 0};
};
MatrixEval eval_field(const MatrixSpace& space, const FieldVector& sigma, int triangle,
                      const Bary& point);

/// Overwrites boundary dofs with g evaluated at their Lagrange points.
FieldVector set_boundary_values(const ScalarSpace& space, FieldVector coeffs,
                                const std::function<double(Vec2)>& g);

/// Text dump: header "space_kind degree ndof", then one coefficient per line.
void write_field_text(const FieldVector& field, std::ostream& os);
FieldVector read_field_text(std::istream& is);

}  // namespace mamix
