#include "padmm/dense.hpp"

#include <cmath>

namespace padmm {

Vec DenseMatrix::apply(const Vec& v, bool transposed) const {
  if (!transposed) {
    if (v.size() != cols) throw std::invalid_argument("dense apply: size mismatch");
    Vec r(rows, 0.0);
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j) r[i] += at(i, j) * v[j];
    return r;
  }
  if (v.size() != rows) throw std::invalid_argument("dense apply^T: size mismatch");
  Vec r(cols, 0.0);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) r[j] += at(i, j) * v[i];
  return r;
}

DenseMatrix DenseMatrix::from_sparse(const SparseMatrix& s) {
  DenseMatrix d(s.rows(), s.cols());
  for (std::size_t r = 0; r < s.rows(); ++r)
    for (std::size_t p = s.row_start()[r]; p < s.row_start()[r + 1]; ++p)
      d.at(r, s.col_index()[p]) = s.values()[p];
  return d;
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix d(n, n);
  for (std::size_t i = 0; i < n; ++i) d.at(i, i) = 1.0;
  return d;
}

Vec solve_dense(DenseMatrix a, Vec b) {
  const std::size_t n = a.rows;
  if (a.cols != n || b.size() != n)
    throw std::invalid_argument("solve_dense: square system required");
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a.at(r, col)) > std::abs(a.at(pivot, col))) pivot = r;
    if (std::abs(a.at(pivot, col)) < 1e-13)
      throw std::runtime_error("solve_dense: singular system");
    if (pivot != col) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a.at(col, j), a.at(pivot, j));
      std::swap(b[col], b[pivot]);
    }
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a.at(r, col) / a.at(col, col);
      if (f == 0.0) continue;
      for (std::size_t j = col; j < n; ++j) a.at(r, j) -= f * a.at(col, j);
      b[r] -= f * b[col];
    }
  }
  Vec x(n, 0.0);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= a.at(i, j) * x[j];
    x[i] = s / a.at(i, i);
  }
  return x;
}

}  // namespace padmm
