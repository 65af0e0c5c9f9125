// Benchmark problem catalog (right-hand sides, boundary data, exact
// solutions where known) and data regularization: clipping and mollification.
#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "mamix/types.hpp"

namespace mamix {

struct ProblemSpec {
  std::string label;
  std::vector<Vec2> domain;  ///< convex CCW polygon
  std::function<double(Vec2)> f;
  std::function<double(Vec2)> g;
  std::function<double(Vec2)> exact_u;         ///< may be empty
  std::function<SymMat2(Vec2)> exact_hessian;  ///< may be empty
  double clip_ceiling = std::numeric_limits<double>::infinity();
  double mollify_radius = 0.0;

  bool has_exact() const { return static_cast<bool>(exact_u); }
};

/// Known labels: "quadratic", "smooth-radial", "boundary-singular", "degenerate".
ProblemSpec catalog(const std::string& label);
std::vector<std::string> catalog_labels();

/// Clip f at `ceiling`, then optionally mollify with a C-infinity bump of the
/// given radius (evaluated by quadrature on a local grid, samples clamped to
/// the domain). Boundary data passes through unchanged.
ProblemSpec regularize(ProblemSpec spec, double ceiling, double mollify_radius = 0.0);

/// Mollify the boundary data along the boundary: a bump-weighted average of g
/// over the arc-length window of the given radius. Needed when g is continuous
/// but has unbounded tangential curvature (data regularization g_m for
/// boundary cusps); the interior problem data is untouched.
ProblemSpec mollify_boundary(ProblemSpec spec, double radius);

struct BoundsReport {
  double inf_f = 0;
  double sup_f = 0;
  bool degenerate_flag = false;  ///< observed inf <= 0.01: data fails a comfortable c0 bound
};

/// Deterministic quasi-random sampling of f over the domain.
BoundsReport bounds_check(const ProblemSpec& spec, int sample_count);

/// Key = value format with expression strings; keys: label, domain (flat list
/// of CCW vertex coordinates), f, g, and optional exact_u, exact_hxx,
/// exact_hxy, exact_hyy.
ProblemSpec load_problem_file(const std::string& path);

/// Convex-polygon helpers shared with the mollifier and samplers.
bool point_in_polygon(const std::vector<Vec2>& polygon, const Vec2& p);
Vec2 clamp_to_polygon(const std::vector<Vec2>& polygon, const Vec2& p);

}  // namespace mamix
