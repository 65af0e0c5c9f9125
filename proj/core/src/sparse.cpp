#include "mamix/sparse.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace mamix {

SparseMatrix SparseMatrix::from_triplets(int rows, int cols,
                                         const std::vector<Triplet>& triplets) {
  if (rows < 0 || cols < 0) throw std::invalid_argument("SparseMatrix: negative dimension");
  SparseMatrix out;
  out.mat_.resize(rows, cols);
  out.mat_.setFromTriplets(triplets.begin(), triplets.end());
  out.mat_.makeCompressed();
  return out;
}

double SparseMatrix::max_abs() const {
  double m = 0.0;
  for (int k = 0; k < mat_.outerSize(); ++k)
    for (Storage::InnerIterator it(mat_, k); it; ++it) m = std::max(m, std::abs(it.value()));
  return m;
}

bool SparseMatrix::is_symmetric(double rel_tol) const {
  if (rows() != cols()) return false;
  const Storage diff = mat_ - Storage(mat_.transpose());
  double m = 0.0;
  for (int k = 0; k < diff.outerSize(); ++k)
    for (Storage::InnerIterator it(diff, k); it; ++it) m = std::max(m, std::abs(it.value()));
  return m <= rel_tol * max_abs();
}

void SparseMatrix::write_coordinate(std::ostream& os) const {
  os << rows() << ' ' << cols() << ' ' << nonzeros() << '\n';
  char buf[32];
  for (int k = 0; k < mat_.outerSize(); ++k)
    for (Storage::InnerIterator it(mat_, k); it; ++it) {
      std::snprintf(buf, sizeof buf, "%.17g", it.value());
      os << it.row() << ' ' << it.col() << ' ' << buf << '\n';
    }
}

SparseMatrix SparseMatrix::read_coordinate(std::istream& is) {
  int rows = 0, cols = 0;
  long nnz = 0;
  if (!(is >> rows >> cols >> nnz)) throw std::invalid_argument("sparse text: bad header");
  std::vector<Triplet> triplets;
  triplets.reserve(nnz);
  for (long k = 0; k < nnz; ++k) {
    int i, j;
    double v;
    if (!(is >> i >> j >> v)) throw std::invalid_argument("sparse text: bad entry record");
    triplets.emplace_back(i, j, v);
  }
  return from_triplets(rows, cols, triplets);
}

}  // namespace mamix
