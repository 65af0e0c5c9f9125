#include "mamix/spaces.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace mamix {

namespace {

std::string point_string(const Vec2& p) {
  std::ostringstream os;
  os << "(" << p.x() << ", " << p.y() << ")";
  return os.str();
}

}  // namespace

ScalarSpace ScalarSpace::create(const Mesh& mesh, int degree) {
  ScalarSpace space;
  space.mesh_ = &mesh;
  space.element_ = ReferenceElement::create(degree);
  space.nodes_per_element_ = space.element_.num_nodes();

  const int k = degree;
  const int nv = mesh.num_vertices();
  const int nt = mesh.num_triangles();
  const int nip = (k - 1) * (k - 2) / 2;

  // Edge ids in lexicographic order of sorted vertex pairs.
  std::vector<std::pair<int, int>> edges;
  edges.reserve(3 * nt);
  for (const auto& tri : mesh.triangles)
    for (int e = 0; e < 3; ++e) {
      const int a = tri[e], b = tri[(e + 1) % 3];
      edges.emplace_back(std::min(a, b), std::max(a, b));
    }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  const int ne = static_cast<int>(edges.size());
  space.num_edges_ = ne;
  auto edge_id = [&edges](int a, int b) {
    const auto key = std::make_pair(std::min(a, b), std::max(a, b));
    return static_cast<int>(std::lower_bound(edges.begin(), edges.end(), key) - edges.begin());
  };

  space.num_dofs_ = nv + (k - 1) * ne + nip * nt;
  space.element_dofs_.assign(static_cast<size_t>(nt) * space.nodes_per_element_, -1);
  space.dof_points_.assign(space.num_dofs_, Vec2(0, 0));

  const auto& roles = space.element_.node_roles();
  for (int t = 0; t < nt; ++t) {
    const auto& tri = mesh.triangles[t];
    const ElementMap map = mesh.element_map(t);
    for (int l = 0; l < space.nodes_per_element_; ++l) {
      const NodeRole& role = roles[l];
      int dof = -1;
      switch (role.kind) {
        case NodeRole::vertex:
          dof = tri[role.which];
          break;
        case NodeRole::edge: {
          const int a = tri[role.which], b = tri[(role.which + 1) % 3];
          // Edge-internal nodes are numbered from the smaller global vertex.
          const int pos = (a < b) ? role.pos : k - role.pos;
          dof = nv + edge_id(a, b) * (k - 1) + (pos - 1);
          break;
        }
        case NodeRole::interior:
          dof = nv + ne * (k - 1) + t * nip + role.which;
          break;
      }
      space.element_dofs_[t * space.nodes_per_element_ + l] = dof;
      const Bary& node = space.element_.nodes()[l];
      space.dof_points_[dof] = map.to_physical(node.r(), node.s());
    }
  }

  // Boundary dofs: vertex and edge dofs carried by boundary edges.
  std::vector<char> on_boundary(space.num_dofs_, 0);
  for (const auto& be : mesh.boundary_edges) {
    on_boundary[be.v0] = 1;
    on_boundary[be.v1] = 1;
    const int e = edge_id(be.v0, be.v1);
    for (int s = 0; s < k - 1; ++s) on_boundary[nv + e * (k - 1) + s] = 1;
  }
  space.interior_index_.assign(space.num_dofs_, -1);
  space.boundary_index_.assign(space.num_dofs_, -1);
  for (int d = 0; d < space.num_dofs_; ++d) {
    if (on_boundary[d]) {
      space.boundary_index_[d] = static_cast<int>(space.boundary_dofs_.size());
      space.boundary_dofs_.push_back(d);
    } else {
      space.interior_index_[d] = static_cast<int>(space.interior_dofs_.size());
      space.interior_dofs_.push_back(d);
    }
  }
  return space;
}

MatrixSpace MatrixSpace::create(const Mesh& mesh, int degree) {
  MatrixSpace space;
  space.scalar_ = ScalarSpace::create(mesh, degree);
  return space;
}

FieldVector interpolate(const ScalarSpace& space, const std::function<double(Vec2)>& fn) {
  FieldVector out;
  out.kind = SpaceKind::scalar;
  out.degree = space.degree();
  out.coeffs.resize(space.num_dofs());
  for (int d = 0; d < space.num_dofs(); ++d) {
    const double v = fn(space.dof_points()[d]);
    if (!std::isfinite(v))
      throw EvaluationError("interpolate: non-finite value at Lagrange point " +
                            point_string(space.dof_points()[d]));
    out.coeffs[d] = v;
  }
  return out;
}

FieldVector interpolate_matrix(const MatrixSpace& space, const std::function<SymMat2(Vec2)>& fn) {
  const ScalarSpace& s = space.scalar();
  FieldVector out;
  out.kind = SpaceKind::matrix;
  out.degree = space.degree();
  out.coeffs.resize(space.num_dofs());
  for (int d = 0; d < s.num_dofs(); ++d) {
    const SymMat2 m = fn(s.dof_points()[d]);
    if (!std::isfinite(m.xx) || !std::isfinite(m.xy) || !std::isfinite(m.yy))
      throw EvaluationError("interpolate_matrix: non-finite value at Lagrange point " +
                            point_string(s.dof_points()[d]));
    out.coeffs[space.dof(0, d)] = m.xx;
    out.coeffs[space.dof(1, d)] = m.xy;
    out.coeffs[space.dof(2, d)] = m.yy;
  }
  return out;
}

ScalarEval eval_field(const ScalarSpace& space, const FieldVector& u, int triangle,
                      const Bary& point) {
  if (triangle < 0 || triangle >= space.mesh().num_triangles())
    throw std::out_of_range("eval_field: triangle index out of range");
  if (u.coeffs.size() != space.num_dofs())
    throw std::invalid_argument("eval_field: coefficient count does not match space");
  const BasisEval basis = space.element().eval_basis(point);
  const ElementMap map = space.mesh().element_map(triangle);
  ScalarEval out;
  Vec2 ref_grad{0, 0};
  for (int i = 0; i < space.nodes_per_element(); ++i) {
    const double c = u.coeffs[space.dof(triangle, i)];
    out.value += c * basis.values[i];
    ref_grad += c * basis.gradients[i];
  }
  out.gradient = map.inv_t * ref_grad;
  return out;
}

MatrixEval eval_field(const MatrixSpace& space, const FieldVector& sigma, int triangle,
                      const Bary& point) {
  const ScalarSpace& s = space.scalar();
  if (triangle < 0 || triangle >= s.mesh().num_triangles())
    throw std::out_of_range("eval_field: triangle index out of range");
  if (sigma.coeffs.size() != space.num_dofs())
    throw std::invalid_argument("eval_field: coefficient count does not match space");
  const BasisEval basis = s.element().eval_basis(point);
  const ElementMap map = s.mesh().element_map(triangle);
  MatrixEval out;
  Vec2 gxx{0, 0}, gxy{0, 0}, gyy{0, 0};
  for (int i = 0; i < s.nodes_per_element(); ++i) {
    const int d = s.dof(triangle, i);
    const double v = basis.values[i];
    const Vec2& g = basis.gradients[i];
    out.value.xx += sigma.coeffs[space.dof(0, d)] * v;
    out.value.xy += sigma.coeffs[space.dof(1, d)] * v;
    out.value.yy += sigma.coeffs[space.dof(2, d)] * v;
    gxx += sigma.coeffs[space.dof(0, d)] * g;
    gxy += sigma.coeffs[space.dof(1, d)] * g;
    gyy += sigma.coeffs[space.dof(2, d)] * g;
  }
  out.grad_xx = map.inv_t * gxx;
  out.grad_xy = map.inv_t * gxy;
  out.grad_yy = map.inv_t * gyy;
  return out;
}

FieldVector set_boundary_values(const ScalarSpace& space, FieldVector coeffs,
                                const std::function<double(Vec2)>& g) {
  if (coeffs.coeffs.size() != space.num_dofs())
    throw std::invalid_argument("set_boundary_values: coefficient count does not match space");
  for (int d : space.boundary_dofs()) {
    const double v = g(space.dof_points()[d]);
    if (!std::isfinite(v))
      throw EvaluationError("set_boundary_values: non-finite value at " +
                            point_string(space.dof_points()[d]));
    coeffs.coeffs[d] = v;
  }
  return coeffs;
}

void write_field_text(const FieldVector& field, std::ostream& os) {
  os << (field.kind == SpaceKind::scalar ? "scalar" : "matrix") << ' ' << field.degree << ' '
     << field.coeffs.size() << '\n';
  char buf[32];
  for (Eigen::Index i = 0; i < field.coeffs.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", field.coeffs[i]);
    os << buf << '\n';
  }
}

FieldVector read_field_text(std::istream& is) {
  std::string kind;
  int degree = 0;
  long ndof = 0;
  if (!(is >> kind >> degree >> ndof) || (kind != "scalar" && kind != "matrix") || ndof < 0)
    throw std::invalid_argument("field text: bad header");
  FieldVector out;
  out.kind = (kind == "scalar") ? SpaceKind::scalar : SpaceKind::matrix;
  out.degree = degree;
  out.coeffs.resize(ndof);
  for (long i = 0; i < ndof; ++i)
    if (!(is >> out.coeffs[i])) throw std::invalid_argument("field text: bad coefficient record");
  return out;
}

}  // namespace mamix
