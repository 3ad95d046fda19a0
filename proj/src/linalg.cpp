#include "padmm/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace padmm {

namespace {

void require(bool cond, const std::string& what) {
  if (!cond) throw std::invalid_argument(what);
}

}  // namespace

double dot(const Vec& a, const Vec& b) {
  require(a.size() == b.size(), "dot: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2_sq(const Vec& a) {
  double s = 0.0;
  for (double v : a) s += v * v;
  return s;
}

double norm2(const Vec& a) { return std::sqrt(norm2_sq(a)); }

double norm_inf(const Vec& a) {
  double s = 0.0;
  for (double v : a) s = std::max(s, std::abs(v));
  return s;
}

bool has_nan(const Vec& a) {
  for (double v : a)
    if (std::isnan(v)) return true;
  return false;
}

Vec zeros(std::size_t n) { return Vec(n, 0.0); }

void add_scaled(Vec& y, double alpha, const Vec& x) {
  require(y.size() == x.size(), "add_scaled: size mismatch");
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += alpha * x[i];
}

void scale(Vec& y, double alpha) {
  for (double& v : y) v *= alpha;
}

Vec sub(const Vec& a, const Vec& b) {
  require(a.size() == b.size(), "sub: size mismatch");
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

Vec add(const Vec& a, const Vec& b) {
  require(a.size() == b.size(), "add: size mismatch");
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

Vec scaled(const Vec& a, double alpha) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = alpha * a[i];
  return r;
}

Vec lincomb(double alpha, const Vec& a, double beta, const Vec& b) {
  require(a.size() == b.size(), "lincomb: size mismatch");
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = alpha * a[i] + beta * b[i];
  return r;
}

// --- SparseMatrix -----------------------------------------------------------

SparseMatrix::SparseMatrix(std::size_t rows, std::size_t cols,
                           std::vector<std::size_t> row_start,
                           std::vector<std::size_t> col_index, Vec values)
    : rows_(rows),
      cols_(cols),
      row_start_(std::move(row_start)),
      col_index_(std::move(col_index)),
      values_(std::move(values)) {
  validate();
}

void SparseMatrix::validate() const {
  require(row_start_.size() == rows_ + 1, "csr: row offsets must have length rows+1");
  require(row_start_.front() == 0, "csr: first offset must be 0");
  require(row_start_.back() == values_.size(), "csr: last offset must equal nnz");
  require(col_index_.size() == values_.size(), "csr: index/value length mismatch");
  for (std::size_t r = 0; r < rows_; ++r) {
    require(row_start_[r] <= row_start_[r + 1], "csr: offsets must be nondecreasing");
    for (std::size_t p = row_start_[r]; p < row_start_[r + 1]; ++p) {
      require(col_index_[p] < cols_, "csr: column index out of range");
      if (p > row_start_[r])
        require(col_index_[p - 1] < col_index_[p],
                "csr: duplicate or unsorted column within a row");
      require(!std::isnan(values_[p]), "csr: NaN value");
    }
  }
}

SparseMatrix SparseMatrix::from_triplets(std::size_t rows, std::size_t cols,
                                         std::vector<Triplet> entries) {
  std::sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  for (std::size_t i = 1; i < entries.size(); ++i)
    require(!(entries[i].row == entries[i - 1].row && entries[i].col == entries[i - 1].col),
            "csr: duplicate (row,col) entry");
  std::vector<std::size_t> row_start(rows + 1, 0);
  std::vector<std::size_t> col_index;
  Vec values;
  col_index.reserve(entries.size());
  values.reserve(entries.size());
  for (const Triplet& t : entries) {
    require(t.row < rows && t.col < cols, "csr: triplet out of range");
    ++row_start[t.row + 1];
    col_index.push_back(t.col);
    values.push_back(t.value);
  }
  for (std::size_t r = 0; r < rows; ++r) row_start[r + 1] += row_start[r];
  return SparseMatrix(rows, cols, std::move(row_start), std::move(col_index),
                      std::move(values));
}

SparseMatrix SparseMatrix::identity(std::size_t n) {
  std::vector<Triplet> t(n);
  for (std::size_t i = 0; i < n; ++i) t[i] = {i, i, 1.0};
  return from_triplets(n, n, std::move(t));
}

SparseMatrix SparseMatrix::from_dense(const std::vector<Vec>& rows) {
  std::vector<Triplet> t;
  std::size_t ncols = rows.empty() ? 0 : rows.front().size();
  for (std::size_t r = 0; r < rows.size(); ++r) {
    require(rows[r].size() == ncols, "from_dense: ragged rows");
    for (std::size_t c = 0; c < ncols; ++c)
      if (rows[r][c] != 0.0) t.push_back({r, c, rows[r][c]});
  }
  return from_triplets(rows.size(), ncols, std::move(t));
}

bool SparseMatrix::is_zero() const {
  for (double v : values_)
    if (v != 0.0) return false;
  return true;
}

Vec SparseMatrix::apply(const Vec& v, bool transposed) const {
  Vec out;
  apply_into(v, transposed, out);
  return out;
}

void SparseMatrix::apply_into(const Vec& v, bool transposed, Vec& out) const {
  if (!transposed) {
    require(v.size() == cols_, "spmv: dimension mismatch");
    out.assign(rows_, 0.0);
    for (std::size_t r = 0; r < rows_; ++r) {
      double s = 0.0;
      for (std::size_t p = row_start_[r]; p < row_start_[r + 1]; ++p)
        s += values_[p] * v[col_index_[p]];
      out[r] = s;
    }
  } else {
    require(v.size() == rows_, "spmv^T: dimension mismatch");
    out.assign(cols_, 0.0);
    for (std::size_t r = 0; r < rows_; ++r) {
      const double vr = v[r];
      if (vr == 0.0) continue;
      for (std::size_t p = row_start_[r]; p < row_start_[r + 1]; ++p)
        out[col_index_[p]] += values_[p] * vr;
    }
  }
}

bool SparseMatrix::structurally_equal(const SparseMatrix& other, double tol) const {
  if (rows_ != other.rows_ || cols_ != other.cols_) return false;
  if (row_start_ != other.row_start_ || col_index_ != other.col_index_) return false;
  for (std::size_t i = 0; i < values_.size(); ++i)
    if (std::abs(values_[i] - other.values_[i]) > tol) return false;
  return true;
}

SparseMatrix vstack(const SparseMatrix& top, const SparseMatrix& bottom) {
  require(top.cols() == bottom.cols() || top.rows() == 0 || bottom.rows() == 0,
          "vstack: column count mismatch");
  std::size_t cols = std::max(top.cols(), bottom.cols());
  std::vector<std::size_t> row_start;
  row_start.reserve(top.rows() + bottom.rows() + 1);
  row_start.insert(row_start.end(), top.row_start().begin(), top.row_start().end());
  const std::size_t off = top.nnz();
  for (std::size_t r = 1; r <= bottom.rows(); ++r)
    row_start.push_back(bottom.row_start()[r] + off);
  std::vector<std::size_t> col_index = top.col_index();
  col_index.insert(col_index.end(), bottom.col_index().begin(), bottom.col_index().end());
  Vec values = top.values();
  values.insert(values.end(), bottom.values().begin(), bottom.values().end());
  return SparseMatrix(top.rows() + bottom.rows(), cols, std::move(row_start),
                      std::move(col_index), std::move(values));
}

SparseMatrix negated(const SparseMatrix& a) {
  Vec values = a.values();
  for (double& v : values) v = -v;
  return SparseMatrix(a.rows(), a.cols(), a.row_start(), a.col_index(),
                      std::move(values));
}

// --- power iteration --------------------------------------------------------

double estimate_lambda1(const SparseMatrix& a, const Lambda1Options& opts) {
  require(opts.tol > 0.0, "estimate_lambda1: tol must be positive");
  if (a.is_zero()) throw std::invalid_argument("estimate_lambda1: zero operator");

  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vec q(a.rows());

  auto randomize = [&] {
    for (double& v : q) v = gauss(rng);
    double n = norm2(q);
    if (n > 0) scale(q, 1.0 / n);
  };
  randomize();

  double lambda = 0.0;
  Vec u, z;
  for (std::size_t it = 0; it < opts.max_iters; ++it) {
    a.apply_into(q, true, u);   // u = A^T q
    a.apply_into(u, false, z);  // z = A u = (A A^T) q
    const double lambda_new = norm2_sq(u);  // Rayleigh quotient of the unit q
    const double zn = norm2(z);
    if (zn == 0.0) {
      // q landed in the null space of A A^T; retry from a fresh direction
      randomize();
      continue;
    }
    for (std::size_t i = 0; i < q.size(); ++i) q[i] = z[i] / zn;
    if (it > 0 && std::abs(lambda_new - lambda) <= opts.tol * std::max(1.0, lambda_new)) {
      return lambda_new * (1.0 + opts.safety);
    }
    lambda = lambda_new;
  }
  throw PowerIterationError("estimate_lambda1: no convergence within max_iters",
                            lambda * (1.0 + opts.safety));
}

// --- projections -------------------------------------------------------------

Vec project_box(const Vec& v, const Vec& lower, const Vec& upper) {
  require(v.size() == lower.size() && v.size() == upper.size(),
          "project_box: size mismatch");
  Vec r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    require(lower[i] <= upper[i], "project_box: empty box");
    r[i] = std::min(std::max(v[i], lower[i]), upper[i]);
  }
  return r;
}

Vec project_cone_d(const Vec& v, std::size_t m1) {
  require(m1 <= v.size(), "project_cone_d: m1 exceeds length");
  Vec r = v;
  for (std::size_t i = m1; i < r.size(); ++i) r[i] = std::max(r[i], 0.0);
  return r;
}

// --- w-space helpers ----------------------------------------------------------

Wpoint wp_zeros(std::size_t dim_y, std::size_t dim_z, std::size_t dim_x) {
  return Wpoint{zeros(dim_y), zeros(dim_z), zeros(dim_x)};
}

Wpoint wp_sub(const Wpoint& a, const Wpoint& b) {
  return Wpoint{sub(a.y, b.y), sub(a.z, b.z), sub(a.x, b.x)};
}

Wpoint wp_lincomb(double alpha, const Wpoint& a, double beta, const Wpoint& b) {
  return Wpoint{lincomb(alpha, a.y, beta, b.y), lincomb(alpha, a.z, beta, b.z),
                lincomb(alpha, a.x, beta, b.x)};
}

Wpoint wp_scaled(const Wpoint& a, double alpha) {
  return Wpoint{scaled(a.y, alpha), scaled(a.z, alpha), scaled(a.x, alpha)};
}

void wp_add_scaled(Wpoint& y, double alpha, const Wpoint& x) {
  add_scaled(y.y, alpha, x.y);
  add_scaled(y.z, alpha, x.z);
  add_scaled(y.x, alpha, x.x);
}

double wp_dot(const Wpoint& a, const Wpoint& b) {
  return dot(a.y, b.y) + dot(a.z, b.z) + dot(a.x, b.x);
}

double wp_norm2(const Wpoint& a) {
  return std::sqrt(norm2_sq(a.y) + norm2_sq(a.z) + norm2_sq(a.x));
}

bool wp_has_nan(const Wpoint& a) {
  return has_nan(a.y) || has_nan(a.z) || has_nan(a.x);
}

// --- preconditioner -----------------------------------------------------------

Vec BlockPreconditioner::apply_y_block(const Vec& dy) const {
  if (t1_kind == T1Kind::lp_spectral) return scaled(dy, sigma * lambda1);
  Vec r = apply_b1_adj(apply_b1(dy));
  scale(r, sigma);
  if (apply_t1) add_scaled(r, 1.0, apply_t1(dy));
  return r;
}

Vec BlockPreconditioner::apply_t2_or_zero(const Vec& dz) const {
  if (t2_kind == T2Kind::zero || !apply_t2) return zeros(dz.size());
  return apply_t2(dz);
}

double m_norm_sq_raw(const BlockPreconditioner& p, const Wpoint& w) {
  double y_term;
  const Vec b1y = p.apply_b1(w.y);
  if (p.t1_kind == BlockPreconditioner::T1Kind::lp_spectral) {
    y_term = p.sigma * p.lambda1 * norm2_sq(w.y);
  } else {
    y_term = p.sigma * norm2_sq(b1y);
    if (p.apply_t1) y_term += dot(w.y, p.apply_t1(w.y));
  }
  double z_term = 0.0;
  if (p.t2_kind == BlockPreconditioner::T2Kind::explicit_op && p.apply_t2)
    z_term = dot(w.z, p.apply_t2(w.z));
  return y_term + 2.0 * dot(b1y, w.x) + z_term + norm2_sq(w.x) / p.sigma;
}

double m_norm_sq(const BlockPreconditioner& p, const Wpoint& w) {
  return std::max(m_norm_sq_raw(p, w), 0.0);
}

double m_norm(const BlockPreconditioner& p, const Wpoint& w) {
  return std::sqrt(m_norm_sq(p, w));
}

Wpoint apply_m(const BlockPreconditioner& p, const Wpoint& w) {
  Vec ry = p.apply_y_block(w.y);
  add_scaled(ry, 1.0, p.apply_b1_adj(w.x));
  Vec rz = p.apply_t2_or_zero(w.z);
  Vec rx = p.apply_b1(w.y);
  add_scaled(rx, 1.0 / p.sigma, w.x);
  return Wpoint{std::move(ry), std::move(rz), std::move(rx)};
}

}  // namespace padmm
