#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <sstream>

#include "mamix/mesh.hpp"

using namespace mamix;

namespace {

const std::vector<Vec2> kUnitSquare = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};

// interior edges shared by exactly 2 triangles, boundary edges by 1
void check_edge_sharing(const Mesh& mesh) {
  std::map<std::pair<int, int>, int> count;
  for (const auto& tri : mesh.triangles)
    for (int e = 0; e < 3; ++e) {
      const int a = tri[e], b = tri[(e + 1) % 3];
      ++count[{std::min(a, b), std::max(a, b)}];
    }
  int boundary = 0;
  for (const auto& [edge, c] : count) {
    CHECK(c <= 2);
    CHECK(c >= 1);
    if (c == 1) ++boundary;
  }
  CHECK(boundary == static_cast<int>(mesh.boundary_edges.size()));
}

void check_mesh_invariants(const Mesh& mesh) {
  double hmax = 0.0;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    CHECK(mesh.triangle_area(t) > 0.0);
    const auto& tri = mesh.triangles[t];
    for (int e = 0; e < 3; ++e)
      hmax = std::max(hmax, (mesh.vertices[tri[e]] - mesh.vertices[tri[(e + 1) % 3]]).norm());
  }
  CHECK(mesh.mesh_size_h == doctest::Approx(hmax).epsilon(1e-14));
  for (const auto& be : mesh.boundary_edges) {
    CHECK(be.normal.norm() == doctest::Approx(1.0).epsilon(1e-12));
    const Vec2 mid = 0.5 * (mesh.vertices[be.v0] + mesh.vertices[be.v1]);
    CHECK(be.normal.dot(mid - mesh.triangle_centroid(be.triangle)) > 0.0);
  }
  check_edge_sharing(mesh);
}

}  // namespace

TEST_CASE("structured mesh: minimal split of the unit square") {
  const Mesh mesh = build_structured_mesh({0, 0, 1, 1}, 1);
  CHECK(mesh.num_triangles() == 2);
  CHECK(mesh.num_vertices() == 4);
  CHECK(mesh.boundary_edges.size() == 4);
  check_mesh_invariants(mesh);
}

TEST_CASE("structured mesh: 2x2 grid counts and mesh size") {
  const Mesh mesh = build_structured_mesh({0, 0, 1, 1}, 2);
  CHECK(mesh.num_triangles() == 8);
  CHECK(mesh.num_vertices() == 9);
  CHECK(mesh.mesh_size_h == doctest::Approx(std::sqrt(2.0) / 2.0).epsilon(1e-14));
  check_mesh_invariants(mesh);
}

TEST_CASE("structured mesh: rectangle cells have equal areas") {
  const Mesh mesh = build_structured_mesh({0, 0, 2, 1}, 1);
  for (int t = 0; t < mesh.num_triangles(); ++t)
    CHECK(mesh.triangle_area(t) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("structured mesh: invalid input") {
  CHECK_THROWS_AS(build_structured_mesh({0, 0, 1, 1}, 0), std::invalid_argument);
  CHECK_THROWS_AS(build_structured_mesh({0, 0, 0, 1}, 2), std::invalid_argument);
}

TEST_CASE("polygon mesh: unit square fan") {
  const Mesh mesh = build_polygon_mesh(kUnitSquare, 0);
  CHECK(mesh.num_triangles() == 4);
  CHECK(mesh.total_area() == doctest::Approx(1.0).epsilon(1e-10));
  check_mesh_invariants(mesh);
}

TEST_CASE("polygon mesh: regular hexagon area") {
  const double side = 0.8;
  std::vector<Vec2> hex;
  for (int i = 0; i < 6; ++i)
    hex.push_back({side * std::cos(M_PI * i / 3.0), side * std::sin(M_PI * i / 3.0)});
  const Mesh mesh = build_polygon_mesh(hex, 0);
  CHECK(mesh.num_triangles() == 6);
  CHECK(mesh.total_area() ==
        doctest::Approx(1.5 * std::sqrt(3.0) * side * side).epsilon(1e-10));
  check_mesh_invariants(mesh);
}

TEST_CASE("polygon mesh: one refinement gives four congruent children") {
  const std::vector<Vec2> tri = {{0, 0}, {1, 0}, {0, 1}};
  const Mesh coarse = build_polygon_mesh(tri, 0);  // fan = 3 triangles
  const Mesh fine = build_polygon_mesh(tri, 1);
  CHECK(fine.num_triangles() == 4 * coarse.num_triangles());
  for (int t = 0; t < fine.num_triangles(); ++t)
    CHECK(fine.triangle_area(t) == doctest::Approx(coarse.triangle_area(0) / 4.0).epsilon(1e-12));
  check_mesh_invariants(fine);
}

TEST_CASE("polygon mesh: rejects clockwise and non-convex input") {
  CHECK_THROWS_AS(build_polygon_mesh({{0, 0}, {0, 1}, {1, 1}, {1, 0}}, 0), std::invalid_argument);
  CHECK_THROWS_AS(build_polygon_mesh({{0, 0}, {1, 0}, {0.4, 0.4}, {0, 1}}, 0),
                  std::invalid_argument);
}

TEST_CASE("refine_uniform quadruples triangles, halves h, preserves area") {
  const Mesh coarse = build_structured_mesh({0, 0, 1, 1}, 1);
  const Mesh fine = refine_uniform(coarse);
  CHECK(fine.num_triangles() == 8);
  CHECK(fine.mesh_size_h == doctest::Approx(0.5 * coarse.mesh_size_h).epsilon(1e-12));
  CHECK(fine.total_area() == doctest::Approx(coarse.total_area()).epsilon(1e-12));
  check_mesh_invariants(fine);

  const Mesh hex_fine = refine_uniform(build_polygon_mesh(kUnitSquare, 0));
  CHECK(hex_fine.mesh_size_h ==
        doctest::Approx(0.5 * build_polygon_mesh(kUnitSquare, 0).mesh_size_h).epsilon(1e-12));
  check_mesh_invariants(hex_fine);
}

TEST_CASE("select_interior: margin zero selects everything") {
  const Mesh mesh = build_structured_mesh({0, 0, 1, 1}, 3);
  const InteriorRegion region = select_interior(mesh, 0.0);
  CHECK(region.selected_triangles.size() == static_cast<size_t>(mesh.num_triangles()));
  CHECK_FALSE(region.empty_selection);
}

TEST_CASE("select_interior: margin selects triangles with all vertices inside the band") {
  const Mesh mesh = build_structured_mesh({0, 0, 1, 1}, 4);
  const InteriorRegion region = select_interior(mesh, 0.3);
  CHECK_FALSE(region.empty_selection);
  for (int t : region.selected_triangles)
    for (int v : mesh.triangles[t]) {
      CHECK(mesh.vertices[v].x() >= 0.3 - 1e-12);
      CHECK(mesh.vertices[v].x() <= 0.7 + 1e-12);
      CHECK(mesh.vertices[v].y() >= 0.3 - 1e-12);
      CHECK(mesh.vertices[v].y() <= 0.7 + 1e-12);
    }
  // complement: any unselected triangle has a vertex within the margin
  std::vector<char> selected(mesh.num_triangles(), 0);
  for (int t : region.selected_triangles) selected[t] = 1;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    if (selected[t]) continue;
    bool has_close_vertex = false;
    for (int v : mesh.triangles[t])
      if (mesh.distance_to_boundary(mesh.vertices[v]) < 0.3) has_close_vertex = true;
    CHECK(has_close_vertex);
  }
}

TEST_CASE("select_interior: oversized margin flags an empty selection") {
  const Mesh mesh = build_structured_mesh({0, 0, 1, 1}, 2);
  const InteriorRegion region = select_interior(mesh, 10.0);
  CHECK(region.empty_selection);
  CHECK(region.selected_triangles.empty());
}

TEST_CASE("mesh text format round trip") {
  const Mesh mesh = build_structured_mesh({0, 0, 2, 1}, 3);
  std::stringstream ss;
  write_mesh_text(mesh, ss);
  const Mesh back = read_mesh_text(ss);
  REQUIRE(back.num_vertices() == mesh.num_vertices());
  REQUIRE(back.num_triangles() == mesh.num_triangles());
  CHECK(back.boundary_edges.size() == mesh.boundary_edges.size());
  for (int v = 0; v < mesh.num_vertices(); ++v)
    CHECK((back.vertices[v] - mesh.vertices[v]).norm() == 0.0);
  CHECK(back.mesh_size_h == doctest::Approx(mesh.mesh_size_h).epsilon(1e-15));
  check_mesh_invariants(back);
}

TEST_CASE("mesh text format rejects malformed input") {
  std::stringstream bad_header("x");
  CHECK_THROWS_AS(read_mesh_text(bad_header), std::invalid_argument);
  std::stringstream truncated("4 2 4\n0 0\n1 0\n");
  CHECK_THROWS_AS(read_mesh_text(truncated), std::invalid_argument);
}

TEST_CASE("total area matches the polygon for every constructor") {
  CHECK(build_structured_mesh({0, 0, 1, 1}, 5).total_area() == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(build_polygon_mesh(kUnitSquare, 2).total_area() == doctest::Approx(1.0).epsilon(1e-10));
}
