#include "mamix/problems.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "mamix/expression.hpp"

namespace mamix {

namespace {

const std::vector<Vec2>& unit_square() {
  static const std::vector<Vec2> square = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  return square;
}

double halton(int index, int base) {
  double f = 1.0, r = 0.0;
  int i = index;
  while (i > 0) {
    f /= base;
    r += f * (i % base);
    i /= base;
  }
  return r;
}

}  // namespace

bool point_in_polygon(const std::vector<Vec2>& polygon, const Vec2& p) {
  const int n = static_cast<int>(polygon.size());
  for (int i = 0; i < n; ++i) {
    const Vec2& a = polygon[i];
    const Vec2& b = polygon[(i + 1) % n];
    const Vec2 e = b - a;
    if (e.x() * (p.y() - a.y()) - e.y() * (p.x() - a.x()) < 0.0) return false;
  }
  return true;
}

Vec2 clamp_to_polygon(const std::vector<Vec2>& polygon, const Vec2& p) {
  if (point_in_polygon(polygon, p)) return p;
  const int n = static_cast<int>(polygon.size());
  Vec2 best = polygon[0];
  double best_d = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    const Vec2& a = polygon[i];
    const Vec2& b = polygon[(i + 1) % n];
    const Vec2 ab = b - a;
    const double t = std::clamp((p - a).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
    const Vec2 q = a + t * ab;
    const double d = (p - q).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = q;
    }
  }
  return best;
}

ProblemSpec catalog(const std::string& label) {
  ProblemSpec spec;
  spec.label = label;
  spec.domain = unit_square();

  if (label == "quadratic") {
    spec.exact_u = [](Vec2 p) { return 0.5 * (p.x() * p.x() + p.y() * p.y()); };
    spec.exact_hessian = [](Vec2) { return SymMat2::identity(); };
    spec.f = [](Vec2) { return 1.0; };
    spec.g = spec.exact_u;
    return spec;
  }
  if (label == "smooth-radial") {
    // u = e^{r^2/2}: D^2 u = e^{r^2/2} (I + x x^T), det = e^{r^2} (1 + r^2).
    spec.exact_u = [](Vec2 p) { return std::exp(0.5 * p.squaredNorm()); };
    spec.exact_hessian = [](Vec2 p) {
      const double e = std::exp(0.5 * p.squaredNorm());
      return SymMat2{e * (1.0 + p.x() * p.x()), e * p.x() * p.y(), e * (1.0 + p.y() * p.y())};
    };
    spec.f = [](Vec2 p) {
      const double r2 = p.squaredNorm();
      return (1.0 + r2) * std::exp(r2);
    };
    spec.g = spec.exact_u;
    return spec;
  }
  if (label == "boundary-singular") {
    // u = -sqrt(2 - r^2): f = 2 / (2 - r^2)^2, unbounded at the corner (1,1).
    spec.exact_u = [](Vec2 p) { return -std::sqrt(2.0 - p.squaredNorm()); };
    spec.exact_hessian = [](Vec2 p) {
      const double w = 2.0 - p.squaredNorm();
      const double s = std::pow(w, -1.5);
      return SymMat2{s * (w + p.x() * p.x()), s * p.x() * p.y(), s * (w + p.y() * p.y())};
    };
    spec.f = [](Vec2 p) {
      const double w = 2.0 - p.squaredNorm();
      return 2.0 / (w * w);
    };
    spec.g = spec.exact_u;
    return spec;
  }
  if (label == "degenerate") {
    // f collapses to 1e-3 inside a disk; stress test, no exact solution.
    spec.f = [](Vec2 p) {
      return ((p - Vec2(0.5, 0.5)).norm() < 0.2) ? 1e-3 : 1.0;
    };
    spec.g = [](Vec2 p) { return 0.5 * p.squaredNorm(); };
    return spec;
  }
  throw std::invalid_argument("catalog: unknown problem label \"" + label + "\"");
}

std::vector<std::string> catalog_labels() {
  return {"quadratic", "smooth-radial", "boundary-singular", "degenerate"};
}

ProblemSpec regularize(ProblemSpec spec, double ceiling, double mollify_radius) {
  if (!(ceiling > 0.0)) throw std::invalid_argument("regularize: ceiling must be positive");
  if (mollify_radius < 0.0) throw std::invalid_argument("regularize: negative mollify radius");

  const auto raw = spec.f;
  std::function<double(Vec2)> clipped = [raw, ceiling](Vec2 p) {
    return std::min(raw(p), ceiling);
  };

  if (mollify_radius > 0.0) {
    // Bump-weighted average over a lattice covering the support disk; sample
    // points are clamped into the domain so f is never evaluated outside it.
    constexpr int half = 4;
    std::vector<Vec2> offsets;
    std::vector<double> weights;
    double total = 0.0;
    for (int i = -half; i <= half; ++i) {
      for (int j = -half; j <= half; ++j) {
        const Vec2 d(mollify_radius * i / half, mollify_radius * j / half);
        const double rho = d.norm() / mollify_radius;
        if (rho >= 1.0) continue;
        const double w = std::exp(-1.0 / (1.0 - rho * rho));
        offsets.push_back(d);
        weights.push_back(w);
        total += w;
      }
    }
    for (auto& w : weights) w /= total;
    const auto domain = spec.domain;
    clipped = [clipped, offsets, weights, domain](Vec2 p) {
      double acc = 0.0;
      for (size_t q = 0; q < offsets.size(); ++q)
        acc += weights[q] * clipped(clamp_to_polygon(domain, p + offsets[q]));
      return acc;
    };
  }

  spec.f = clipped;
  spec.clip_ceiling = std::min(spec.clip_ceiling, ceiling);
  spec.mollify_radius = mollify_radius;
  return spec;
}

ProblemSpec mollify_boundary(ProblemSpec spec, double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("mollify_boundary: radius must be positive");

  // Arc-length parametrization of the polygon boundary.
  const std::vector<Vec2> poly = spec.domain;
  const int nv = static_cast<int>(poly.size());
  std::vector<double> cum(nv + 1, 0.0);
  for (int i = 0; i < nv; ++i)
    cum[i + 1] = cum[i] + (poly[(i + 1) % nv] - poly[i]).norm();
  const double total = cum[nv];

  auto at_arclength = [poly, cum, nv, total](double s) {
    s = std::fmod(std::fmod(s, total) + total, total);
    int i = nv - 1;
    for (int j = 0; j < nv; ++j)
      if (s < cum[j + 1]) {
        i = j;
        break;
      }
    const double t = (s - cum[i]) / (cum[i + 1] - cum[i]);
    return Vec2(poly[i] + t * (poly[(i + 1) % nv] - poly[i]));
  };

  auto arclength_of = [poly, cum, nv](const Vec2& p) {
    double best_d = std::numeric_limits<double>::infinity();
    double best_s = 0.0;
    for (int i = 0; i < nv; ++i) {
      const Vec2& a = poly[i];
      const Vec2 ab = poly[(i + 1) % nv] - a;
      const double t = std::clamp((p - a).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
      const double d = (p - (a + t * ab)).squaredNorm();
      if (d < best_d) {
        best_d = d;
        best_s = cum[i] + t * ab.norm();
      }
    }
    return best_s;
  };

  // 1D bump weights on a fixed lattice over (-radius, radius).
  constexpr int half = 8;
  std::vector<double> offsets, weights;
  double wsum = 0.0;
  for (int i = -half; i <= half; ++i) {
    const double rho = double(i) / half;
    if (std::abs(rho) >= 1.0) continue;
    const double w = std::exp(-1.0 / (1.0 - rho * rho));
    offsets.push_back(rho * radius);
    weights.push_back(w);
    wsum += w;
  }
  for (auto& w : weights) w /= wsum;

  const auto g = spec.g;
  spec.g = [g, at_arclength, arclength_of, offsets, weights](Vec2 p) {
    const double s = arclength_of(p);
    double acc = 0.0;
    for (size_t q = 0; q < offsets.size(); ++q) acc += weights[q] * g(at_arclength(s + offsets[q]));
    return acc;
  };
  spec.mollify_radius = std::max(spec.mollify_radius, radius);
  return spec;
}

BoundsReport bounds_check(const ProblemSpec& spec, int sample_count) {
  double xmin = spec.domain[0].x(), xmax = xmin, ymin = spec.domain[0].y(), ymax = ymin;
  for (const auto& v : spec.domain) {
    xmin = std::min(xmin, v.x());
    xmax = std::max(xmax, v.x());
    ymin = std::min(ymin, v.y());
    ymax = std::max(ymax, v.y());
  }

  BoundsReport report;
  report.inf_f = std::numeric_limits<double>::infinity();
  report.sup_f = -std::numeric_limits<double>::infinity();
  int accepted = 0;
  for (int i = 1; accepted < sample_count; ++i) {
    const Vec2 p(xmin + (xmax - xmin) * halton(i, 2), ymin + (ymax - ymin) * halton(i, 3));
    if (!point_in_polygon(spec.domain, p)) continue;
    ++accepted;
    const double v = spec.f(p);
    report.inf_f = std::min(report.inf_f, v);
    report.sup_f = std::max(report.sup_f, v);
  }
  report.degenerate_flag = report.inf_f <= 0.01;
  return report;
}

ProblemSpec load_problem_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open problem file: " + path);

  std::map<std::string, std::string> entries;
  std::string line;
  while (std::getline(is, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r");
      const auto b = s.find_last_not_of(" \t\r");
      return (a == std::string::npos) ? std::string() : s.substr(a, b - a + 1);
    };
    entries[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }

  auto need = [&](const std::string& key) {
    const auto it = entries.find(key);
    if (it == entries.end())
      throw std::invalid_argument("problem file " + path + ": missing key \"" + key + "\"");
    return it->second;
  };

  ProblemSpec spec;
  spec.label = entries.count("label") ? entries["label"] : path;

  std::istringstream ds(need("domain"));
  double x, y;
  while (ds >> x >> y) spec.domain.push_back({x, y});
  if (spec.domain.size() < 3)
    throw std::invalid_argument("problem file " + path + ": domain needs at least 3 vertices");

  auto scalar_expr = [](const std::string& src) {
    const Expression e = Expression::parse(src);
    return std::function<double(Vec2)>([e](Vec2 p) { return e(p.x(), p.y()); });
  };
  spec.f = scalar_expr(need("f"));
  spec.g = scalar_expr(need("g"));
  if (entries.count("exact_u")) spec.exact_u = scalar_expr(entries["exact_u"]);
  if (entries.count("exact_hxx")) {
    const Expression hxx = Expression::parse(need("exact_hxx"));
    const Expression hxy = Expression::parse(need("exact_hxy"));
    const Expression hyy = Expression::parse(need("exact_hyy"));
    spec.exact_hessian = [hxx, hxy, hyy](Vec2 p) {
      return SymMat2{hxx(p.x(), p.y()), hxy(p.x(), p.y()), hyy(p.x(), p.y())};
    };
  }
  return spec;
}

}  // namespace mamix
