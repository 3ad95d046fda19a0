#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace padmm {

using Vec = std::vector<double>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------
// Dense vector helpers. All loops run in index order so results are
// reproducible bit for bit across runs.
// ---------------------------------------------------------------------------

double dot(const Vec& a, const Vec& b);
double norm2_sq(const Vec& a);
double norm2(const Vec& a);
double norm_inf(const Vec& a);
bool has_nan(const Vec& a);

Vec zeros(std::size_t n);

/// y += alpha * x
void add_scaled(Vec& y, double alpha, const Vec& x);
void scale(Vec& y, double alpha);

Vec sub(const Vec& a, const Vec& b);
Vec add(const Vec& a, const Vec& b);
Vec scaled(const Vec& a, double alpha);
/// alpha*a + beta*b
Vec lincomb(double alpha, const Vec& a, double beta, const Vec& b);

// ---------------------------------------------------------------------------
// Compressed sparse row matrix.
//
// Invariants (checked on construction): row offsets nondecreasing with
// length rows+1, column indices strictly increasing within each row (hence
// no duplicates) and inside [0, cols), values free of NaN.
// ---------------------------------------------------------------------------

struct Triplet {
  std::size_t row = 0;
  std::size_t col = 0;
  double value = 0.0;
};

class SparseMatrix {
 public:
  SparseMatrix() = default;
  SparseMatrix(std::size_t rows, std::size_t cols,
               std::vector<std::size_t> row_start,
               std::vector<std::size_t> col_index, Vec values);

  /// Sorts the triplets; throws std::invalid_argument on duplicate (row,col).
  static SparseMatrix from_triplets(std::size_t rows, std::size_t cols,
                                    std::vector<Triplet> entries);
  static SparseMatrix identity(std::size_t n);
  /// Dense rows, dropping exact zeros. Test and fixture convenience.
  static SparseMatrix from_dense(const std::vector<Vec>& rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t nnz() const { return values_.size(); }
  const std::vector<std::size_t>& row_start() const { return row_start_; }
  const std::vector<std::size_t>& col_index() const { return col_index_; }
  const Vec& values() const { return values_; }

  /// True when the matrix has no entry with a nonzero value.
  bool is_zero() const;

  /// A*v (or A^T v when transposed). Throws std::invalid_argument on a
  /// dimension mismatch. Sequential accumulation in storage order.
  Vec apply(const Vec& v, bool transposed = false) const;
  void apply_into(const Vec& v, bool transposed, Vec& out) const;

  bool structurally_equal(const SparseMatrix& other, double tol = 0.0) const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::size_t> row_start_{0};
  std::vector<std::size_t> col_index_;
  Vec values_;

  void validate() const;
};

/// [top; bottom] with matching column counts.
SparseMatrix vstack(const SparseMatrix& top, const SparseMatrix& bottom);
SparseMatrix negated(const SparseMatrix& a);

// ---------------------------------------------------------------------------
// Largest eigenvalue of A A^T by power iteration.
// ---------------------------------------------------------------------------

struct Lambda1Options {
  double tol = 1e-6;            // relative change stopping rule
  std::size_t max_iters = 5000;
  std::uint64_t seed = 0;
  double safety = 1e-3;         // returned estimate is scaled by 1+safety
};

struct PowerIterationError : std::runtime_error {
  PowerIterationError(const std::string& what, double best)
      : std::runtime_error(what), best_estimate(best) {}
  double best_estimate;
};

/// Over-approximates lambda_1(A A^T): the converged Rayleigh quotient times
/// (1+safety). Throws std::invalid_argument for a zero operator and
/// PowerIterationError (carrying the best estimate) when the stopping rule
/// is not met within max_iters.
double estimate_lambda1(const SparseMatrix& a, const Lambda1Options& opts = {});

// ---------------------------------------------------------------------------
// Projections.
// ---------------------------------------------------------------------------

/// Componentwise clamp to [lower, upper]; bounds may be +-inf.
/// Throws std::invalid_argument when some lower_i > upper_i ("empty box").
Vec project_box(const Vec& v, const Vec& lower, const Vec& upper);

/// Keeps the first m1 entries, truncates the rest at zero from below.
Vec project_cone_d(const Vec& v, std::size_t m1);

// ---------------------------------------------------------------------------
// Block preconditioner
//
//   [ sigma B1*B1 + T1   0    B1* ]
//   [ 0                  T2   0   ]
//   [ B1                 0    I/sigma ]
//
// applied without ever assembling the matrix. The lp_spectral kind encodes
// T1 = sigma (lambda1 I - B1* B1), collapsing the y block to sigma*lambda1*I.
// ---------------------------------------------------------------------------

struct Wpoint {
  Vec y, z, x;
};

Wpoint wp_zeros(std::size_t dim_y, std::size_t dim_z, std::size_t dim_x);
Wpoint wp_sub(const Wpoint& a, const Wpoint& b);
Wpoint wp_lincomb(double alpha, const Wpoint& a, double beta, const Wpoint& b);
Wpoint wp_scaled(const Wpoint& a, double alpha);
void wp_add_scaled(Wpoint& y, double alpha, const Wpoint& x);
double wp_dot(const Wpoint& a, const Wpoint& b);
double wp_norm2(const Wpoint& a);
bool wp_has_nan(const Wpoint& a);

struct BlockPreconditioner {
  enum class T1Kind { explicit_op, lp_spectral };
  enum class T2Kind { zero, explicit_op };

  double sigma = 1.0;
  double lambda1 = 0.0;  // only read for lp_spectral
  T1Kind t1_kind = T1Kind::explicit_op;
  T2Kind t2_kind = T2Kind::zero;

  std::function<Vec(const Vec&)> apply_b1;      // Y -> X
  std::function<Vec(const Vec&)> apply_b1_adj;  // X -> Y
  std::function<Vec(const Vec&)> apply_t1;      // Y -> Y, explicit_op only
  std::function<Vec(const Vec&)> apply_t2;      // Z -> Z, explicit_op only

  /// (sigma B1*B1 + T1) dy; sigma*lambda1*dy for lp_spectral.
  Vec apply_y_block(const Vec& dy) const;
  Vec apply_t2_or_zero(const Vec& dz) const;
};

/// <w, M w> evaluated blockwise; negative round-off is clamped at zero.
double m_norm_sq(const BlockPreconditioner& p, const Wpoint& w);
/// Unclamped variant, for property checks.
double m_norm_sq_raw(const BlockPreconditioner& p, const Wpoint& w);
double m_norm(const BlockPreconditioner& p, const Wpoint& w);
Wpoint apply_m(const BlockPreconditioner& p, const Wpoint& w);

}  // namespace padmm
