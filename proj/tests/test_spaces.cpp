#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <random>
#include <sstream>

#include "mamix/spaces.hpp"

using namespace mamix;

namespace {

bool on_unit_square_boundary(const Vec2& p, double tol = 1e-12) {
  return std::abs(p.x()) < tol || std::abs(p.x() - 1) < tol || std::abs(p.y()) < tol ||
         std::abs(p.y() - 1) < tol;
}

}  // namespace

TEST_CASE("dof count formula") {
  for (int k : {1, 2, 3, 4}) {
    for (int n : {1, 2, 3}) {
      const Mesh mesh = build_structured_mesh({0, 0, 1, 1}, n);
      const ScalarSpace space = ScalarSpace::create(mesh, k);
      const int expected = mesh.num_vertices() + (k - 1) * space.num_edges() +
                           (k - 1) * (k - 2) / 2 * mesh.num_triangles();
      CHECK(space.num_dofs() == expected);
      CHECK(MatrixSpace::create(mesh, k).num_dofs() == 3 * expected);
    }
  }
}

TEST_CASE("boundary dofs are exactly the dofs on the boundary") {
  const Mesh mesh = build_structured_mesh({0, 0, 1, 1}, 3);
  for (int k : {1, 2, 3}) {
    const ScalarSpace space = ScalarSpace::create(mesh, k);
    for (int d = 0; d < space.num_dofs(); ++d)
      CHECK(space.is_boundary_dof(d) == on_unit_square_boundary(space.dof_points()[d]));
    CHECK(space.boundary_dofs().size() + space.interior_dofs().size() ==
          static_cast<size_t>(space.num_dofs()));
  }
}

TEST_CASE("fields are continuous across interior edges") {
  const Mesh mesh = build_structured_mesh({0, 0, 1, 1}, 2);
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> dist(-1, 1);
  for (int k : {1, 2, 3}) {
    const ScalarSpace space = ScalarSpace::create(mesh, k);
    FieldVector u;
    u.kind = SpaceKind::scalar;
    u.degree = k;
    u.coeffs.resize(space.num_dofs());
    for (int d = 0; d < space.num_dofs(); ++d) u.coeffs[d] = dist(rng);

    // find edges shared by two triangles together with local edge ids
    std::map<std::pair<int, int>, std::vector<std::pair<int, int>>> edge_use;
    for (int t = 0; t < mesh.num_triangles(); ++t)
      for (int e = 0; e < 3; ++e) {
        const int a = mesh.triangles[t][e], b = mesh.triangles[t][(e + 1) % 3];
        edge_use[{std::min(a, b), std::max(a, b)}].push_back({t, e});
      }
    for (const auto& [edge, uses] : edge_use) {
      if (uses.size() != 2) continue;
      for (int sample = 1; sample <= 5; ++sample) {
        const double s = sample / 6.0;
        const Vec2 p = (1 - s) * mesh.vertices[edge.first] + s * mesh.vertices[edge.second];
        double values[2];
        for (int side = 0; side < 2; ++side) {
          const auto [t, e] = uses[side];
          const ElementMap map = mesh.element_map(t);
          const Vec2 rs = map.jacobian.inverse() * (p - map.origin);
          values[side] =
              eval_field(space, u, t, Bary(1 - rs.x() - rs.y(), rs.x(), rs.y())).value;
        }
        CHECK(values[0] == doctest::Approx(values[1]).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("interpolate: constants, coordinates, and quadratic reproduction") {
  const Mesh mesh = build_structured_mesh({0, 0, 1, 1}, 1);
  const ScalarSpace p1 = ScalarSpace::create(mesh, 1);

  const FieldVector ones = interpolate(p1, [](Vec2) { return 1.0; });
  for (int d = 0; d < p1.num_dofs(); ++d) CHECK(ones.coeffs[d] == doctest::Approx(1.0));

  const FieldVector xs = interpolate(p1, [](Vec2 p) { return p.x(); });
  for (int d = 0; d < p1.num_dofs(); ++d)
    CHECK(xs.coeffs[d] == doctest::Approx(p1.dof_points()[d].x()).epsilon(1e-14));

  const Mesh mesh2 = build_structured_mesh({0, 0, 1, 1}, 3);
  const ScalarSpace p2 = ScalarSpace::create(mesh2, 2);
  const FieldVector xx = interpolate(p2, [](Vec2 p) { return p.x() * p.x(); });
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> dist(0, 1);
  for (int trial = 0; trial < 50; ++trial) {
    double r = dist(rng), s = dist(rng);
    if (r + s > 1) {
      r = 1 - r;
      s = 1 - s;
    }
    const int t = trial % mesh2.num_triangles();
    const ElementMap map = mesh2.element_map(t);
    const Vec2 p = map.to_physical(r, s);
    CHECK(eval_field(p2, xx, t, Bary(1 - r - s, r, s)).value ==
          doctest::Approx(p.x() * p.x()).epsilon(1e-12));
  }
}

TEST_CASE("interpolate reports non-finite values with the offending point") {
  const Mesh mesh = build_structured_mesh({0, 0, 1, 1}, 1);
  const ScalarSpace space = ScalarSpace::create(mesh, 1);
  CHECK_THROWS_AS(interpolate(space, [](Vec2 p) { return 1.0 / (p.x() + p.y()); }),
                  EvaluationError);
}

TEST_CASE("interpolate_matrix: identity field and exact Hessians") {
  const Mesh mesh = build_structured_mesh({0, 0, 1, 1}, 2);
  const MatrixSpace mspace = MatrixSpace::create(mesh, 2);

  const FieldVector id = interpolate_matrix(mspace, [](Vec2) { return SymMat2::identity(); });
  const int n = mspace.scalar().num_dofs();
  for (int d = 0; d < n; ++d) {
    CHECK(id.coeffs[mspace.dof(0, d)] == doctest::Approx(1.0));
    CHECK(id.coeffs[mspace.dof(1, d)] == doctest::Approx(0.0));
    CHECK(id.coeffs[mspace.dof(2, d)] == doctest::Approx(1.0));
  }

  // D^2 of x^2 + xy is constant
  const FieldVector hq = interpolate_matrix(mspace, [](Vec2) { return SymMat2{2.0, 1.0, 0.0}; });
  const MatrixEval at = eval_field(mspace, hq, 0, Bary(1.0 / 3, 1.0 / 3, 1.0 / 3));
  CHECK(at.value.xx == doctest::Approx(2.0));
  CHECK(at.value.xy == doctest::Approx(1.0));
  CHECK(at.value.yy == doctest::Approx(0.0));

  // Hessian of e^{(x^2+y^2)/2} evaluated by hand at the origin node
  const FieldVector hg = interpolate_matrix(mspace, [](Vec2 p) {
    const double e = std::exp(0.5 * p.squaredNorm());
    return SymMat2{e * (1 + p.x() * p.x()), e * p.x() * p.y(), e * (1 + p.y() * p.y())};
  });
  int origin_dof = -1;
  for (int d = 0; d < n; ++d)
    if (mspace.scalar().dof_points()[d].norm() < 1e-14) origin_dof = d;
  REQUIRE(origin_dof >= 0);
  CHECK(hg.coeffs[mspace.dof(0, origin_dof)] == doctest::Approx(1.0));
  CHECK(hg.coeffs[mspace.dof(1, origin_dof)] == doctest::Approx(0.0));
  CHECK(hg.coeffs[mspace.dof(2, origin_dof)] == doctest::Approx(1.0));
}

TEST_CASE("eval_field: values, gradients, and range checks") {
  const Mesh mesh = build_structured_mesh({0, 0, 1, 1}, 2);
  const ScalarSpace space = ScalarSpace::create(mesh, 2);

  const FieldVector c5 = interpolate(space, [](Vec2) { return 5.0; });
  const ScalarEval at = eval_field(space, c5, 1, Bary(0.2, 0.5, 0.3));
  CHECK(at.value == doctest::Approx(5.0).epsilon(1e-13));
  CHECK(at.gradient.norm() == doctest::Approx(0.0).epsilon(1e-11));

  const FieldVector xs = interpolate(space, [](Vec2 p) { return p.x(); });
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const Bary centroid(1.0 / 3, 1.0 / 3, 1.0 / 3);
    const ScalarEval e = eval_field(space, xs, t, centroid);
    CHECK(e.value == doctest::Approx(mesh.triangle_centroid(t).x()).epsilon(1e-13));
    CHECK(e.gradient.x() == doctest::Approx(1.0).epsilon(1e-11));
    CHECK(e.gradient.y() == doctest::Approx(0.0).epsilon(1e-11));
  }

  CHECK_THROWS_AS(eval_field(space, c5, mesh.num_triangles(), Bary(1, 0, 0)), std::out_of_range);
}

TEST_CASE("set_boundary_values: overwrite, idempotence, interior untouched") {
  const Mesh mesh = build_structured_mesh({0, 0, 1, 1}, 2);
  const ScalarSpace space = ScalarSpace::create(mesh, 2);

  FieldVector u = interpolate(space, [](Vec2) { return 7.0; });
  const FieldVector zeroed = set_boundary_values(space, u, [](Vec2) { return 0.0; });
  for (int d : space.boundary_dofs()) CHECK(zeroed.coeffs[d] == 0.0);
  for (int d : space.interior_dofs()) CHECK(zeroed.coeffs[d] == 7.0);

  const auto g = [](Vec2 p) { return p.x() + p.y(); };
  const FieldVector once = set_boundary_values(space, u, g);
  for (int d : space.boundary_dofs()) {
    const Vec2 p = space.dof_points()[d];
    CHECK(once.coeffs[d] == doctest::Approx(p.x() + p.y()).epsilon(1e-14));
  }
  const FieldVector twice = set_boundary_values(space, once, g);
  CHECK((twice.coeffs - once.coeffs).norm() == 0.0);
}

TEST_CASE("field text dump round trip") {
  const Mesh mesh = build_structured_mesh({0, 0, 1, 1}, 2);
  const ScalarSpace space = ScalarSpace::create(mesh, 2);
  const FieldVector u = interpolate(space, [](Vec2 p) { return std::sin(p.x()) + p.y() / 3.0; });
  std::stringstream ss;
  write_field_text(u, ss);
  const FieldVector back = read_field_text(ss);
  CHECK(back.kind == u.kind);
  CHECK(back.degree == u.degree);
  REQUIRE(back.coeffs.size() == u.coeffs.size());
  CHECK((back.coeffs - u.coeffs).lpNorm<Eigen::Infinity>() == 0.0);  // 17 digits round-trip
}
