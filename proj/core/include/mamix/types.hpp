// Small value types shared across the library.
#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace mamix {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

/// Symmetric 2x2 matrix stored as (xx, xy, yy).
struct SymMat2 {
  double xx = 0.0;
  double xy = 0.0;
  double yy = 0.0;

  static SymMat2 identity() { return {1.0, 0.0, 1.0}; }
  static SymMat2 diag(double a, double c) { return {a, 0.0, c}; }

  double det() const { return xx * yy - xy * xy; }
  double trace() const { return xx + yy; }

  /// cof [[a,b],[b,c]] = [[c,-b],[-b,a]]
  SymMat2 cof() const { return {yy, -xy, xx}; }

  /// Frobenius inner product; the off-diagonal entry counts twice.
  double ddot(const SymMat2& o) const { return xx * o.xx + 2.0 * xy * o.xy + yy * o.yy; }

  double frobenius_norm() const { return std::sqrt(ddot(*this)); }

  /// Eigenvalues of the symmetric matrix, smallest first: mean +/- radius.
  std::pair<double, double> eigenvalues() const {
    const double mean = 0.5 * (xx + yy);
    const double radius = std::hypot(0.5 * (xx - yy), xy);
    return {mean - radius, mean + radius};
  }

  SymMat2 operator+(const SymMat2& o) const { return {xx + o.xx, xy + o.xy, yy + o.yy}; }
  SymMat2 operator-(const SymMat2& o) const { return {xx - o.xx, xy - o.xy, yy - o.yy}; }
  SymMat2 operator*(double s) const { return {s * xx, s * xy, s * yy}; }
};

inline SymMat2 operator*(double s, const SymMat2& m) { return m * s; }

class FactorizationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EvaluationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mamix
