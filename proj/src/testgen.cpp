#include "padmm/testgen.hpp"

#include <cmath>
#include <memory>
#include <random>

namespace padmm {

GeneratedLp generate_lp(const LpGenOptions& opts) {
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> coeff(-2.0, 2.0);

  const std::size_t n = opts.n, m1 = opts.m1, m2 = opts.m2, m = m1 + m2;
  if (n == 0 || m == 0) throw std::invalid_argument("generate_lp: empty instance");

  std::vector<Triplet> triplets;
  for (std::size_t r = 0; r < m; ++r) {
    std::size_t row_nnz = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (unit(rng) < opts.density) {
        double v = coeff(rng);
        if (std::abs(v) < 0.1) v = v < 0 ? -0.1 : 0.1;
        triplets.push_back({r, j, v});
        ++row_nnz;
      }
    }
    if (row_nnz == 0) {
      const std::size_t j = static_cast<std::size_t>(unit(rng) * n) % n;
      triplets.push_back({r, j, 1.0});
    }
  }
  const SparseMatrix a = SparseMatrix::from_triplets(m, n, std::move(triplets));

  LpInstance lp;
  lp.name = "gen_" + std::to_string(opts.seed);
  lp.lower.assign(n, 0.0);
  lp.upper.assign(n, kInf);
  Vec x_star(n), z_star(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    const bool boxed = unit(rng) < opts.boxed_fraction;
    double lo, hi;
    if (boxed) {
      lo = -3.0 + 3.0 * unit(rng);
      hi = lo + 0.5 + 3.5 * unit(rng);
    } else if (unit(rng) < 0.5) {
      lo = -3.0 + 3.0 * unit(rng);
      hi = kInf;
    } else {
      lo = -kInf;
      hi = 3.0 * unit(rng);
    }
    lp.lower[j] = lo;
    lp.upper[j] = hi;

    const double u = unit(rng);
    if (u < 0.25 && std::isfinite(lo)) {
      x_star[j] = lo;
      z_star[j] = opts.margin + unit(rng);  // active lower bound
    } else if (u < 0.5 && std::isfinite(hi)) {
      x_star[j] = hi;
      z_star[j] = -(opts.margin + unit(rng));  // active upper bound
    } else {
      const double span_lo = std::isfinite(lo) ? lo + 0.05 : -3.0;
      const double span_hi = std::isfinite(hi) ? hi - 0.05 : 3.0;
      x_star[j] = span_lo + (span_hi - span_lo) * unit(rng);
      z_star[j] = 0.0;
    }
  }

  Vec y_star(m);
  for (std::size_t i = 0; i < m1; ++i) y_star[i] = -1.0 + 2.0 * unit(rng);
  std::vector<bool> row_active(m2, false);
  for (std::size_t i = 0; i < m2; ++i) {
    row_active[i] = unit(rng) < 0.5;
    y_star[m1 + i] = row_active[i] ? opts.margin + unit(rng) : 0.0;
  }

  lp.cost = a.apply(y_star, true);
  add_scaled(lp.cost, 1.0, z_star);

  const Vec ax = a.apply(x_star, false);
  lp.b_eq.assign(ax.begin(), ax.begin() + m1);
  lp.b_ge.assign(m2, 0.0);
  for (std::size_t i = 0; i < m2; ++i)
    lp.b_ge[i] = ax[m1 + i] - (row_active[i] ? 0.0 : opts.margin + unit(rng));

  // split the stacked matrix back into the two row blocks
  std::vector<Triplet> eq_t, ge_t;
  for (std::size_t r = 0; r < m; ++r)
    for (std::size_t p = a.row_start()[r]; p < a.row_start()[r + 1]; ++p) {
      if (r < m1) eq_t.push_back({r, a.col_index()[p], a.values()[p]});
      else ge_t.push_back({r - m1, a.col_index()[p], a.values()[p]});
    }
  lp.a_eq = SparseMatrix::from_triplets(m1, n, std::move(eq_t));
  lp.a_ge = SparseMatrix::from_triplets(m2, n, std::move(ge_t));
  lp.validate();

  GeneratedLp out;
  out.lp = std::move(lp);
  out.w_star = Wpoint{std::move(y_star), std::move(z_star), std::move(x_star)};
  out.optimal_value = dot(out.lp.cost, out.w_star.x);
  return out;
}

namespace {

struct QuadData {
  DenseMatrix b1, b2;
  Vec t1_diag, t2_diag;  // empty means zero
  Vec a_center, d_center;
  Vec c;
};

Vec diag_apply(const Vec& d, const Vec& v) {
  Vec r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) r[i] = d[i] * v[i];
  return r;
}

// minimizer of 0.5||v - center||^2 + <x, B v> + sigma/2 ||B v + rest||^2
//              + 0.5||v - prev||^2_Tdiag
Vec quad_block_solve(const DenseMatrix& b, const Vec& t_diag, const Vec& center,
                     const Vec& x, const Vec& rest, const Vec& prev, double sigma) {
  const std::size_t d = b.cols;
  DenseMatrix h(d, d);
  for (std::size_t i = 0; i < d; ++i) {
    h.at(i, i) = 1.0 + (t_diag.empty() ? 0.0 : t_diag[i]);
    for (std::size_t j = 0; j < d; ++j) {
      double btb = 0.0;
      for (std::size_t r = 0; r < b.rows; ++r) btb += b.at(r, i) * b.at(r, j);
      h.at(i, j) += sigma * btb;
    }
  }
  Vec rhs = center;
  add_scaled(rhs, -1.0, b.apply(x, true));
  add_scaled(rhs, -sigma, b.apply(rest, true));
  if (!t_diag.empty()) add_scaled(rhs, 1.0, diag_apply(t_diag, prev));
  return solve_dense(std::move(h), std::move(rhs));
}

}  // namespace

Wpoint GeneratedCop::saddle_operator(const Wpoint& w) const {
  Vec gy = sub(w.y, a_center);
  add_scaled(gy, 1.0, b1.apply(w.x, true));
  Vec gz = sub(w.z, d_center);
  add_scaled(gz, 1.0, b2.apply(w.x, true));
  Vec gx = cop.c;
  add_scaled(gx, -1.0, b1.apply(w.y));
  add_scaled(gx, -1.0, b2.apply(w.z));
  return Wpoint{std::move(gy), std::move(gz), std::move(gx)};
}

double GeneratedCop::kkt_residual(const Wpoint& w) const {
  return wp_norm2(saddle_operator(w));
}

GeneratedCop generate_quad_cop(const QuadCopOptions& opts) {
  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  auto data = std::make_shared<QuadData>();
  data->b1 = DenseMatrix(opts.dim_x, opts.dim_y);
  data->b2 = DenseMatrix(opts.dim_x, opts.dim_z);
  for (double& v : data->b1.a) v = gauss(rng);
  for (double& v : data->b2.a) v = gauss(rng);
  if (opts.with_t1) {
    data->t1_diag.resize(opts.dim_y);
    for (double& v : data->t1_diag) v = unit(rng);
  }
  if (opts.with_t2) {
    data->t2_diag.resize(opts.dim_z);
    for (double& v : data->t2_diag) v = unit(rng);
  }

  Wpoint w_star;
  w_star.y.resize(opts.dim_y);
  w_star.z.resize(opts.dim_z);
  w_star.x.resize(opts.dim_x);
  for (double& v : w_star.y) v = gauss(rng);
  for (double& v : w_star.z) v = gauss(rng);
  for (double& v : w_star.x) v = gauss(rng);

  data->a_center = add(w_star.y, data->b1.apply(w_star.x, true));
  data->d_center = add(w_star.z, data->b2.apply(w_star.x, true));
  data->c = add(data->b1.apply(w_star.y), data->b2.apply(w_star.z));

  GeneratedCop out;
  out.b1 = data->b1;
  out.b2 = data->b2;
  out.t1_diag = data->t1_diag;
  out.t2_diag = data->t2_diag;
  out.a_center = data->a_center;
  out.d_center = data->d_center;
  out.w_star = w_star;

  CopInstance& cop = out.cop;
  cop.dim_y = opts.dim_y;
  cop.dim_z = opts.dim_z;
  cop.dim_x = opts.dim_x;
  cop.c = data->c;
  cop.apply_b1 = [data](const Vec& y) { return data->b1.apply(y); };
  cop.apply_b1_adj = [data](const Vec& u) { return data->b1.apply(u, true); };
  cop.apply_b2 = [data](const Vec& z) { return data->b2.apply(z); };
  cop.apply_b2_adj = [data](const Vec& u) { return data->b2.apply(u, true); };
  cop.solve_z = [data](const Vec& y, const Vec& z_prev, const Vec& x, double sigma) {
    Vec rest = data->b1.apply(y);
    add_scaled(rest, -1.0, data->c);
    return quad_block_solve(data->b2, data->t2_diag, data->d_center, x, rest,
                            z_prev, sigma);
  };
  cop.solve_y = [data](const Vec& y_prev, const Vec& zbar, const Vec& xbar,
                       double sigma) {
    Vec rest = data->b2.apply(zbar);
    add_scaled(rest, -1.0, data->c);
    return quad_block_solve(data->b1, data->t1_diag, data->a_center, xbar, rest,
                            y_prev, sigma);
  };
  cop.eval_f1 = [data](const Vec& y) { return 0.5 * norm2_sq(sub(y, data->a_center)); };
  cop.eval_f2 = [data](const Vec& z) { return 0.5 * norm2_sq(sub(z, data->d_center)); };
  cop.apply_t1 = data->t1_diag.empty()
                     ? std::function<Vec(const Vec&)>()
                     : [data](const Vec& v) { return diag_apply(data->t1_diag, v); };
  cop.apply_t2 = data->t2_diag.empty()
                     ? std::function<Vec(const Vec&)>()
                     : [data](const Vec& v) { return diag_apply(data->t2_diag, v); };

  BlockPreconditioner& p = out.precond;
  p.sigma = 1.0;  // callers overwrite before use
  p.t1_kind = BlockPreconditioner::T1Kind::explicit_op;
  p.t2_kind = data->t2_diag.empty() ? BlockPreconditioner::T2Kind::zero
                                    : BlockPreconditioner::T2Kind::explicit_op;
  p.apply_b1 = cop.apply_b1;
  p.apply_b1_adj = cop.apply_b1_adj;
  p.apply_t1 = cop.apply_t1;
  p.apply_t2 = cop.apply_t2;

  out.optimal_value = cop.eval_f1(w_star.y) + cop.eval_f2(w_star.z);
  return out;
}

ScalarConsensusCop make_scalar_consensus_cop() {
  ScalarConsensusCop out;
  CopInstance& cop = out.cop;
  cop.dim_y = cop.dim_z = cop.dim_x = 1;
  cop.c = {0.0};
  auto id = [](const Vec& v) { return v; };
  cop.apply_b1 = id;
  cop.apply_b1_adj = id;
  cop.apply_b2 = id;
  cop.apply_b2_adj = id;
  cop.solve_z = [](const Vec&, const Vec&, const Vec&, double) { return Vec{0.0}; };
  cop.solve_y = [](const Vec&, const Vec& zbar, const Vec& xbar, double sigma) {
    return Vec{-zbar[0] - xbar[0] / sigma};
  };
  cop.eval_f1 = [](const Vec&) { return 0.0; };
  cop.eval_f2 = [](const Vec& z) { return z[0] == 0.0 ? 0.0 : kInf; };

  BlockPreconditioner& p = out.precond;
  p.sigma = 1.0;
  p.t1_kind = BlockPreconditioner::T1Kind::explicit_op;
  p.t2_kind = BlockPreconditioner::T2Kind::zero;
  p.apply_b1 = id;
  p.apply_b1_adj = id;

  out.w_star = Wpoint{{0.0}, {0.0}, {0.0}};
  return out;
}

}  // namespace padmm
