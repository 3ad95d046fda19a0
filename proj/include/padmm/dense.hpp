#pragma once

#include "padmm/linalg.hpp"

namespace padmm {

// Small row-major dense matrix for the desk-scale oracles and generators.
struct DenseMatrix {
  std::size_t rows = 0, cols = 0;
  Vec a;  // rows*cols

  DenseMatrix() = default;
  DenseMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, 0.0) {}

  double& at(std::size_t i, std::size_t j) { return a[i * cols + j]; }
  double at(std::size_t i, std::size_t j) const { return a[i * cols + j]; }

  Vec apply(const Vec& v, bool transposed = false) const;
  static DenseMatrix from_sparse(const SparseMatrix& s);
  static DenseMatrix identity(std::size_t n);
};

/// Gaussian elimination with partial pivoting. Throws std::runtime_error on a
/// (numerically) singular system.
Vec solve_dense(DenseMatrix a, Vec b);

}  // namespace padmm
