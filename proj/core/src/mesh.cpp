#include "mamix/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <istream>
#include <sstream>
#include <stdexcept>

namespace mamix {

namespace {

double signed_area(const Vec2& a, const Vec2& b, const Vec2& c) {
  return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (b.y() - a.y()));
}

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 == 0.0) return (p - a).norm();
  const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

/// Fills boundary edges, normals and mesh_size_h; validates orientation and conformity.
void finalize_mesh(Mesh& mesh) {
  const int nt = mesh.num_triangles();
  const int nv = mesh.num_vertices();

  for (int t = 0; t < nt; ++t) {
    for (int v : mesh.triangles[t]) {
      if (v < 0 || v >= nv) throw std::invalid_argument("mesh: vertex index out of range");
    }
    if (mesh.triangle_area(t) <= 0.0)
      throw std::invalid_argument("mesh: triangle " + std::to_string(t) +
                                  " has non-positive area (must be counterclockwise)");
  }

  // Undirected edge -> (triangle, local edge) incidences.
  std::map<std::pair<int, int>, std::vector<std::pair<int, int>>> edge_use;
  for (int t = 0; t < nt; ++t) {
    const auto& tri = mesh.triangles[t];
    for (int e = 0; e < 3; ++e) {
      const int a = tri[e], b = tri[(e + 1) % 3];
      edge_use[{std::min(a, b), std::max(a, b)}].push_back({t, e});
    }
  }

  mesh.boundary_edges.clear();
  double hmax = 0.0;
  for (const auto& [key, uses] : edge_use) {
    if (uses.size() > 2)
      throw std::invalid_argument("mesh: edge shared by more than two triangles");
    const double len = (mesh.vertices[key.first] - mesh.vertices[key.second]).norm();
    hmax = std::max(hmax, len);
    if (uses.size() == 1) {
      const auto [t, e] = uses.front();
      const auto& tri = mesh.triangles[t];
      BoundaryEdge be;
      be.v0 = tri[e];
      be.v1 = tri[(e + 1) % 3];
      be.triangle = t;
      const Vec2 d = mesh.vertices[be.v1] - mesh.vertices[be.v0];
      be.normal = Vec2(d.y(), -d.x()).normalized();  // outward for CCW traversal
      mesh.boundary_edges.push_back(be);
    }
  }
  mesh.mesh_size_h = hmax;
}

}  // namespace

double Mesh::triangle_area(int t) const {
  const auto& tri = triangles.at(t);
  return signed_area(vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]);
}

Vec2 Mesh::triangle_centroid(int t) const {
  const auto& tri = triangles.at(t);
  return (vertices[tri[0]] + vertices[tri[1]] + vertices[tri[2]]) / 3.0;
}

ElementMap Mesh::element_map(int t) const {
  const auto& tri = triangles.at(t);
  ElementMap map;
  map.origin = vertices[tri[0]];
  map.jacobian.col(0) = vertices[tri[1]] - vertices[tri[0]];
  map.jacobian.col(1) = vertices[tri[2]] - vertices[tri[0]];
  map.det = map.jacobian.determinant();
  map.inv_t = map.jacobian.inverse().transpose();
  return map;
}

double Mesh::total_area() const {
  double area = 0.0;
  for (int t = 0; t < num_triangles(); ++t) area += triangle_area(t);
  return area;
}

double Mesh::distance_to_boundary(const Vec2& p) const {
  double d = std::numeric_limits<double>::infinity();
  for (const auto& be : boundary_edges)
    d = std::min(d, point_segment_distance(p, vertices[be.v0], vertices[be.v1]));
  return d;
}

Mesh build_structured_mesh(const Rect& domain, int n) {
  if (n < 1) throw std::invalid_argument("build_structured_mesh: n must be >= 1");
  if (!(domain.xmax > domain.xmin) || !(domain.ymax > domain.ymin))
    throw std::invalid_argument("build_structured_mesh: degenerate rectangle");

  Mesh mesh;
  const int np = n + 1;
  mesh.vertices.reserve(np * np);
  for (int j = 0; j < np; ++j)
    for (int i = 0; i < np; ++i)
      mesh.vertices.push_back({domain.xmin + (domain.xmax - domain.xmin) * i / n,
                               domain.ymin + (domain.ymax - domain.ymin) * j / n});

  auto vid = [np](int i, int j) { return j * np + i; };
  mesh.triangles.reserve(2 * n * n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int v00 = vid(i, j), v10 = vid(i + 1, j);
      const int v01 = vid(i, j + 1), v11 = vid(i + 1, j + 1);
      mesh.triangles.push_back({v00, v10, v11});
      mesh.triangles.push_back({v00, v11, v01});
    }
  }
  finalize_mesh(mesh);
  return mesh;
}

Mesh build_polygon_mesh(const std::vector<Vec2>& polygon, int refinements) {
  const int nv = static_cast<int>(polygon.size());
  if (nv < 3) throw std::invalid_argument("build_polygon_mesh: need at least 3 vertices");
  if (refinements < 0) throw std::invalid_argument("build_polygon_mesh: negative refinement count");

  // Convex and counterclockwise: every consecutive turn is a strict left turn.
  for (int i = 0; i < nv; ++i) {
    const Vec2& a = polygon[i];
    const Vec2& b = polygon[(i + 1) % nv];
    const Vec2& c = polygon[(i + 2) % nv];
    if (signed_area(a, b, c) <= 0.0)
      throw std::invalid_argument("build_polygon_mesh: polygon must be convex and counterclockwise");
  }

  Vec2 centroid{0, 0};
  for (const auto& p : polygon) centroid += p;
  centroid /= nv;

  Mesh mesh;
  mesh.vertices = polygon;
  mesh.vertices.push_back(centroid);
  for (int i = 0; i < nv; ++i) mesh.triangles.push_back({i, (i + 1) % nv, nv});
  finalize_mesh(mesh);

  for (int r = 0; r < refinements; ++r) mesh = refine_uniform(mesh);
  return mesh;
}

Mesh refine_uniform(const Mesh& mesh) {
  Mesh fine;
  fine.vertices = mesh.vertices;

  std::map<std::pair<int, int>, int> midpoint;
  auto mid = [&](int a, int b) {
    const auto key = std::make_pair(std::min(a, b), std::max(a, b));
    auto it = midpoint.find(key);
    if (it != midpoint.end()) return it->second;
    const int id = static_cast<int>(fine.vertices.size());
    fine.vertices.push_back(0.5 * (mesh.vertices[a] + mesh.vertices[b]));
    midpoint.emplace(key, id);
    return id;
  };

  fine.triangles.reserve(4 * mesh.triangles.size());
  for (const auto& tri : mesh.triangles) {
    const int a = tri[0], b = tri[1], c = tri[2];
    const int ab = mid(a, b), bc = mid(b, c), ca = mid(c, a);
    fine.triangles.push_back({a, ab, ca});
    fine.triangles.push_back({ab, b, bc});
    fine.triangles.push_back({ca, bc, c});
    fine.triangles.push_back({ab, bc, ca});
  }
  finalize_mesh(fine);
  return fine;
}

InteriorRegion select_interior(const Mesh& mesh, double margin) {
  if (margin < 0.0) throw std::invalid_argument("select_interior: margin must be >= 0");
  InteriorRegion region;
  region.margin = margin;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    bool inside = true;
    for (int v : mesh.triangles[t]) {
      if (mesh.distance_to_boundary(mesh.vertices[v]) < margin) {
        inside = false;
        break;
      }
    }
    if (inside) region.selected_triangles.push_back(t);
  }
  region.empty_selection = region.selected_triangles.empty();
  return region;
}

void write_mesh_text(const Mesh& mesh, std::ostream& os) {
  char buf[64];
  os << mesh.num_vertices() << ' ' << mesh.num_triangles() << ' '
     << mesh.boundary_edges.size() << '\n';
  for (const auto& v : mesh.vertices) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g", v.x(), v.y());
    os << buf << '\n';
  }
  for (const auto& t : mesh.triangles) os << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  for (const auto& be : mesh.boundary_edges) os << be.v0 << ' ' << be.v1 << ' ' << be.triangle << '\n';
}

Mesh read_mesh_text(std::istream& is) {
  int nv = 0, nt = 0, nb = 0;
  if (!(is >> nv >> nt >> nb)) throw std::invalid_argument("mesh text: bad header");
  if (nv < 3 || nt < 1) throw std::invalid_argument("mesh text: too few vertices or triangles");
  Mesh mesh;
  mesh.vertices.resize(nv);
  for (auto& v : mesh.vertices)
    if (!(is >> v.x() >> v.y())) throw std::invalid_argument("mesh text: bad vertex record");
  mesh.triangles.resize(nt);
  for (auto& t : mesh.triangles)
    if (!(is >> t[0] >> t[1] >> t[2])) throw std::invalid_argument("mesh text: bad triangle record");
  for (int i = 0; i < nb; ++i) {  // boundary records are recomputed, only consumed here
    int a, b, marker;
    if (!(is >> a >> b >> marker)) throw std::invalid_argument("mesh text: bad boundary record");
  }
  finalize_mesh(mesh);
  if (static_cast<int>(mesh.boundary_edges.size()) != nb)
    throw std::invalid_argument("mesh text: boundary edge count does not match triangulation");
  return mesh;
}

void write_mesh_file(const Mesh& mesh, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open mesh file for writing: " + path);
  write_mesh_text(mesh, os);
}

Mesh read_mesh_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open mesh file: " + path);
  return read_mesh_text(is);
}

}  // namespace mamix
