#include "padmm/lp.hpp"

#include <cmath>

namespace padmm {

void LpInstance::validate() const {
  const std::size_t n = num_vars();
  if (a_eq.rows() != num_eq() || a_ge.rows() != num_ge())
    throw std::invalid_argument("lp: rhs length does not match row count");
  if ((a_eq.rows() > 0 && a_eq.cols() != n) || (a_ge.rows() > 0 && a_ge.cols() != n))
    throw std::invalid_argument("lp: column count mismatch");
  if (lower.size() != n || upper.size() != n)
    throw std::invalid_argument("lp: bound length mismatch");
  for (std::size_t i = 0; i < n; ++i)
    if (!(lower[i] <= upper[i])) throw std::invalid_argument("lp: empty box");
  if (num_rows() == 0 || (a_eq.is_zero() && a_ge.is_zero()))
    throw std::invalid_argument("lp: constraint matrix must be nonzero");
}

SparseMatrix stack_rows(const LpInstance& lp) {
  if (lp.num_eq() == 0) return lp.a_ge;
  if (lp.num_ge() == 0) return lp.a_eq;
  return vstack(lp.a_eq, lp.a_ge);
}

Vec stack_rhs(const LpInstance& lp) {
  Vec b = lp.b_eq;
  b.insert(b.end(), lp.b_ge.begin(), lp.b_ge.end());
  return b;
}

double support_c(const Vec& z, const Vec& lower, const Vec& upper) {
  if (z.size() != lower.size() || z.size() != upper.size())
    throw std::invalid_argument("support_c: size mismatch");
  double total = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double zi = z[i];
    if (zi == 0.0) continue;
    // sup over [l,u] of -z t is attained at l for z > 0, at u for z < 0
    const double bound = zi > 0.0 ? lower[i] : upper[i];
    if (!std::isfinite(bound)) return kInf;
    total += -zi * bound;
  }
  return total;
}

DualCop dualize(const LpInstance& lp, double sigma, double lambda1_hat) {
  lp.validate();
  if (!(sigma > 0.0)) throw std::invalid_argument("dualize: sigma must be positive");
  if (!(lambda1_hat > 0.0))
    throw std::invalid_argument("dualize: lambda1 estimate must be positive");

  auto data = std::make_shared<DualCop::Data>();
  data->a = stack_rows(lp);
  data->b = stack_rhs(lp);
  data->c = lp.cost;
  data->lower = lp.lower;
  data->upper = lp.upper;
  data->m1 = lp.num_eq();
  data->sigma = sigma;
  data->lambda1 = lambda1_hat;

  const std::size_t m = data->a.rows();
  const std::size_t n = data->a.cols();

  DualCop dual;
  dual.sigma = sigma;
  dual.lambda1 = lambda1_hat;
  dual.m1 = data->m1;
  dual.data = data;

  CopInstance& cop = dual.cop;
  cop.dim_y = m;
  cop.dim_z = n;
  cop.dim_x = n;
  cop.c = data->c;
  cop.apply_b1 = [data](const Vec& y) { return data->a.apply(y, true); };
  cop.apply_b1_adj = [data](const Vec& u) { return data->a.apply(u, false); };
  cop.apply_b2 = [](const Vec& z) { return z; };
  cop.apply_b2_adj = [](const Vec& u) { return u; };

  cop.solve_z = [data](const Vec& y, const Vec& /*z_prev*/, const Vec& x,
                       double sig) {
    Vec p = data->a.apply(y, true);
    add_scaled(p, -1.0, data->c);
    scale(p, sig);
    add_scaled(p, 1.0, x);  // p = x + sigma (A*y - c)
    Vec zbar = project_box(p, data->lower, data->upper);
    for (std::size_t i = 0; i < zbar.size(); ++i) zbar[i] = (zbar[i] - p[i]) / sig;
    return zbar;
  };

  cop.solve_y = [data](const Vec& y_prev, const Vec& zbar, const Vec& xbar,
                       double sig) {
    Vec r = data->a.apply(y_prev, true);  // A* y
    add_scaled(r, 1.0, zbar);
    add_scaled(r, -1.0, data->c);
    scale(r, sig);
    add_scaled(r, 1.0, xbar);  // xbar + sigma (A* y + zbar - c)
    Vec g = data->a.apply(r, false);
    add_scaled(g, -1.0, data->b);  // A(...) - b
    Vec q = y_prev;
    add_scaled(q, -1.0 / (sig * data->lambda1), g);
    return project_cone_d(q, data->m1);
  };

  cop.eval_f1 = [data](const Vec& y) {
    for (std::size_t i = data->m1; i < y.size(); ++i)
      if (y[i] < 0.0) return kInf;
    return -dot(data->b, y);
  };
  cop.eval_f2 = [data](const Vec& z) { return support_c(z, data->lower, data->upper); };

  cop.apply_t1 = [data](const Vec& v) {
    Vec r = data->a.apply(data->a.apply(v, true), false);  // A A* v
    Vec out = scaled(v, data->sigma * data->lambda1);
    add_scaled(out, -data->sigma, r);
    return out;
  };
  cop.apply_t2 = nullptr;

  BlockPreconditioner& p = dual.precond;
  p.sigma = sigma;
  p.lambda1 = lambda1_hat;
  p.t1_kind = BlockPreconditioner::T1Kind::lp_spectral;
  p.t2_kind = BlockPreconditioner::T2Kind::zero;
  p.apply_b1 = cop.apply_b1;
  p.apply_b1_adj = cop.apply_b1_adj;
  return dual;
}

std::pair<Vec, Vec> z_x_update(const DualCop& dual, const Vec& y, const Vec& x) {
  const auto& d = *dual.data;
  const Vec aty = d.a.apply(y, true);
  Vec zbar = dual.cop.solve_z(y, Vec(d.c.size(), 0.0), x, d.sigma);
  // literal multiplier update, so the identity check is exact
  Vec xbar = x;
  Vec residual = aty;
  add_scaled(residual, 1.0, zbar);
  add_scaled(residual, -1.0, d.c);
  add_scaled(xbar, d.sigma, residual);
  return {std::move(zbar), std::move(xbar)};
}

Vec y_update(const DualCop& dual, const Vec& y_prev, const Vec& zbar,
             const Vec& xbar) {
  return dual.cop.solve_y(y_prev, zbar, xbar, dual.sigma);
}

double OptimalityParts::measure() const {
  if (gap_infinite) return kInf;
  return std::max(gap_rel, std::max(pinf_rel, dinf_rel));
}

OptimalityParts optimality_parts(const LpInstance& lp, const Vec& x, const Vec& y,
                                 const Vec& z) {
  const SparseMatrix a = stack_rows(lp);
  const Vec b = stack_rhs(lp);
  OptimalityParts parts;

  parts.primal_obj = dot(lp.cost, x);
  const double support = support_c(z, lp.lower, lp.upper);
  parts.gap_infinite = !std::isfinite(support);
  parts.dual_obj = parts.gap_infinite ? -kInf : dot(b, y) - support;
  if (parts.gap_infinite) {
    parts.gap_rel = 1.0;  // logged value; measure() still reports +inf
  } else {
    const double gap = std::abs(parts.dual_obj - parts.primal_obj);
    parts.gap_rel = gap / (1.0 + std::abs(parts.dual_obj) + std::abs(parts.primal_obj));
  }

  Vec prim = b;
  add_scaled(prim, -1.0, a.apply(x, false));
  parts.pinf_rel = norm2(project_cone_d(prim, lp.num_eq())) / (1.0 + norm2(b));

  Vec dres = lp.cost;
  add_scaled(dres, -1.0, a.apply(y, true));
  add_scaled(dres, -1.0, z);
  parts.dinf_rel = norm2(dres) / (1.0 + norm2(lp.cost));
  return parts;
}

double optimality_measure(const LpInstance& lp, const Vec& x, const Vec& y,
                          const Vec& z) {
  return optimality_parts(lp, x, y, z).measure();
}

double merit_rtilde(const LpInstance& lp, double sigma, const Vec& x_avg,
                    const Vec& y_avg, const Vec& z_avg) {
  if (!(sigma > 0.0)) throw std::invalid_argument("merit: sigma must be positive");
  const SparseMatrix a = stack_rows(lp);
  Vec prim = stack_rhs(lp);
  add_scaled(prim, -1.0, a.apply(x_avg, false));
  const double pr = norm2_sq(project_cone_d(prim, lp.num_eq()));

  Vec dres = lp.cost;
  add_scaled(dres, -1.0, a.apply(y_avg, true));
  add_scaled(dres, -1.0, z_avg);
  const double dr = norm2_sq(dres);
  return std::sqrt(pr / sigma + sigma * dr);
}

}  // namespace padmm
