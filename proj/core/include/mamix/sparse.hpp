// Compressed sparse matrix value type (row-ordered, canonicalized triplets)
// with coordinate-format text dump for cross-checking.
#pragma once

#include <iosfwd>
#include <vector>

#include <Eigen/Sparse>

#include "mamix/types.hpp"

namespace mamix {

class SparseMatrix {
 public:
  using Storage = Eigen::SparseMatrix<double, Eigen::RowMajor>;
  using Triplet = Eigen::Triplet<double>;

  SparseMatrix() = default;

  /// Canonicalizes: sorts by (row, col) and sums duplicates.
  static SparseMatrix from_triplets(int rows, int cols, const std::vector<Triplet>& triplets);

  int rows() const { return static_cast<int>(mat_.rows()); }
  int cols() const { return static_cast<int>(mat_.cols()); }
  long nonzeros() const { return mat_.nonZeros(); }

  const Storage& storage() const { return mat_; }

  Eigen::VectorXd apply(const Eigen::VectorXd& x) const { return mat_ * x; }

  double max_abs() const;

  /// max |A_ij - A_ji| <= rel_tol * max |A|
  bool is_symmetric(double rel_tol = 1e-12) const;

  /// Coordinate format: "nrows ncols nnz" then "i j value" lines, row-ordered.
  void write_coordinate(std::ostream& os) const;
  static SparseMatrix read_coordinate(std::istream& is);

 private:
  Storage mat_;
};

}  // namespace mamix
