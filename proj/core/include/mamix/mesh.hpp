// Conforming triangulations of convex polygonal domains: structured grids,
// centroid fans, uniform refinement, boundary edges with outward normals,
// and interior-subdomain selection for compact-subset error measurement.
#pragma once

#include <array>
#include <iosfwd>
#include <vector>

#include "mamix/types.hpp"

namespace mamix {

struct BoundaryEdge {
  int v0 = -1;         ///< endpoints, in the traversal order of the adjacent triangle
  int v1 = -1;
  int triangle = -1;   ///< index of the unique adjacent triangle
  Vec2 normal{0, 0};   ///< outward unit normal
};

/// Affine map from the reference triangle (0,0),(1,0),(0,1) to a physical triangle.
struct ElementMap {
  Vec2 origin;     ///< image of the reference origin (first vertex)
  Mat2 jacobian;   ///< columns are the two edge vectors
  Mat2 inv_t;      ///< inverse transpose, maps reference gradients to physical ones
  double det = 0;  ///< = 2 * area

  Vec2 to_physical(double ref_x, double ref_y) const {
    return origin + jacobian * Vec2(ref_x, ref_y);
  }
};

struct Mesh {
  std::vector<Vec2> vertices;
  std::vector<std::array<int, 3>> triangles;  ///< vertex indices, counterclockwise
  std::vector<BoundaryEdge> boundary_edges;
  double mesh_size_h = 0.0;  ///< max edge length over all triangles

  int num_vertices() const { return static_cast<int>(vertices.size()); }
  int num_triangles() const { return static_cast<int>(triangles.size()); }

  double triangle_area(int t) const;
  Vec2 triangle_centroid(int t) const;
  ElementMap element_map(int t) const;
  double total_area() const;

  /// Distance from a point to the domain boundary (min over boundary edges).
  double distance_to_boundary(const Vec2& p) const;
};

struct Rect {
  double xmin = 0, ymin = 0, xmax = 1, ymax = 1;
};

/// n x n grid of cells, each split along the bottom-left-to-top-right diagonal.
Mesh build_structured_mesh(const Rect& domain, int n);

/// Fan triangulation from the centroid of a convex CCW polygon, then uniform refinements.
Mesh build_polygon_mesh(const std::vector<Vec2>& polygon, int refinements);

/// Split every triangle into 4 by edge midpoints; halves mesh_size_h.
Mesh refine_uniform(const Mesh& mesh);

struct InteriorRegion {
  double margin = 0.0;
  std::vector<int> selected_triangles;  ///< sorted triangle indices
  bool empty_selection = false;
};

/// Triangles whose vertices all lie at distance >= margin from the boundary.
InteriorRegion select_interior(const Mesh& mesh, double margin);

/// Text format: "nv nt nb", nv lines "x y", nt lines "i j k", nb lines "i j marker".
void write_mesh_text(const Mesh& mesh, std::ostream& os);
Mesh read_mesh_text(std::istream& is);
void write_mesh_file(const Mesh& mesh, const std::string& path);
Mesh read_mesh_file(const std::string& path);

}  // namespace mamix
