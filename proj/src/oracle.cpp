#include "padmm/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "padmm/dense.hpp"

namespace padmm {

namespace {

constexpr double kClip = 1e8;  // synthetic box for unbounded directions

struct ActiveRow {
  Vec coeffs;
  double rhs = 0.0;
  bool synthetic = false;  // came from clipping an infinite bound
};

}  // namespace

TinyLpSolution solve_tiny_lp(const LpInstance& lp) {
  lp.validate();
  const std::size_t n = lp.num_vars();
  if (n > 12 || lp.num_rows() > 12)
    throw std::invalid_argument("solve_tiny_lp: instance too large");

  const DenseMatrix a_eq = DenseMatrix::from_sparse(lp.a_eq);
  const DenseMatrix a_ge = DenseMatrix::from_sparse(lp.a_ge);

  // candidate active constraints: every row, every finite (or clipped) bound
  std::vector<ActiveRow> pool;
  auto unit = [&](std::size_t j, double sign) {
    Vec r(n, 0.0);
    r[j] = sign;
    return r;
  };
  for (std::size_t i = 0; i < lp.num_eq(); ++i) {
    Vec row(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) row[j] = a_eq.at(i, j);
    pool.push_back({std::move(row), lp.b_eq[i], false});
  }
  for (std::size_t i = 0; i < lp.num_ge(); ++i) {
    Vec row(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) row[j] = a_ge.at(i, j);
    pool.push_back({std::move(row), lp.b_ge[i], false});
  }
  for (std::size_t j = 0; j < n; ++j) {
    const bool lo_inf = !std::isfinite(lp.lower[j]);
    const bool up_inf = !std::isfinite(lp.upper[j]);
    pool.push_back({unit(j, 1.0), lo_inf ? -kClip : lp.lower[j], lo_inf});
    if (lp.lower[j] != lp.upper[j])
      pool.push_back({unit(j, 1.0), up_inf ? kClip : lp.upper[j], up_inf});
  }

  double scale = 1.0;
  for (const auto& r : pool)
    for (double v : r.coeffs) scale = std::max(scale, std::abs(v));
  const double feas_tol = 1e-9 * scale * std::max(1.0, kClip * 1e-6);

  auto feasible = [&](const Vec& x) {
    for (std::size_t j = 0; j < n; ++j) {
      const double lo = std::isfinite(lp.lower[j]) ? lp.lower[j] : -kClip;
      const double hi = std::isfinite(lp.upper[j]) ? lp.upper[j] : kClip;
      if (x[j] < lo - feas_tol || x[j] > hi + feas_tol) return false;
    }
    const Vec r_eq = a_eq.apply(x);
    for (std::size_t i = 0; i < r_eq.size(); ++i)
      if (std::abs(r_eq[i] - lp.b_eq[i]) > feas_tol) return false;
    const Vec r_ge = a_ge.apply(x);
    for (std::size_t i = 0; i < r_ge.size(); ++i)
      if (r_ge[i] < lp.b_ge[i] - feas_tol) return false;
    return true;
  };

  TinyLpSolution best;
  best.status = TinyLpStatus::infeasible;
  bool best_on_clip = false;

  std::vector<std::size_t> pick(n);
  std::size_t combos = 0;
  constexpr std::size_t kMaxCombos = 3000000;

  auto try_active_set = [&]() {
    if (++combos > kMaxCombos)
      throw std::runtime_error("solve_tiny_lp: enumeration budget exceeded");
    DenseMatrix sys(n, n);
    Vec rhs(n);
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t j = 0; j < n; ++j) sys.at(r, j) = pool[pick[r]].coeffs[j];
      rhs[r] = pool[pick[r]].rhs;
    }
    Vec x;
    try {
      x = solve_dense(std::move(sys), std::move(rhs));
    } catch (const std::runtime_error&) {
      return;  // singular active set
    }
    if (!feasible(x)) return;
    const double value = dot(lp.cost, x);
    if (best.status != TinyLpStatus::optimal || value < best.value - 1e-12 * (1 + std::abs(value))) {
      best.status = TinyLpStatus::optimal;
      best.value = value;
      best.x = x;
      best_on_clip = false;
      for (std::size_t r = 0; r < n; ++r)
        if (pool[pick[r]].synthetic &&
            std::abs(dot(pool[pick[r]].coeffs, x) - pool[pick[r]].rhs) <= feas_tol)
          best_on_clip = true;
    }
  };

  // choose n of pool.size() active constraints
  std::function<void(std::size_t, std::size_t)> choose = [&](std::size_t start,
                                                             std::size_t depth) {
    if (depth == n) {
      try_active_set();
      return;
    }
    for (std::size_t i = start; i + (n - depth - 1) < pool.size(); ++i) {
      pick[depth] = i;
      choose(i + 1, depth + 1);
    }
  };
  if (n > 0 && pool.size() >= n) choose(0, 0);

  if (best.status == TinyLpStatus::optimal && best_on_clip) {
    best.status = TinyLpStatus::unbounded;
  }
  if (best.status == TinyLpStatus::optimal) best.value += lp.objective_constant;
  return best;
}

Vec generic_prox(const ProxProblem& problem, Vec x0, double tol,
                 std::size_t max_iters) {
  if (!(tol > 0.0)) throw std::invalid_argument("generic_prox: tol must be positive");
  auto project = [&](const Vec& v) { return problem.project ? problem.project(v) : v; };

  Vec x = project(x0);
  double fx = problem.value(x);
  double t = 1.0;

  for (std::size_t it = 0; it < max_iters; ++it) {
    const Vec g = problem.gradient(x);

    // unit-step optimality residual
    Vec probe = x;
    add_scaled(probe, -1.0, g);
    probe = project(probe);
    add_scaled(probe, -1.0, x);
    if (norm2(probe) <= tol) return x;

    // backtracking on the proximal decrease condition; the step size is
    // monotone nonincreasing: value differences drown in round-off near the
    // optimum, so a step accepted there must never exceed one calibrated in
    // the noise-free phase
    Vec x_new;
    double f_new = 0.0;
    while (true) {
      x_new = x;
      add_scaled(x_new, -t, g);
      x_new = project(x_new);
      const Vec d = sub(x_new, x);
      f_new = problem.value(x_new);
      const double model = fx + dot(g, d) + norm2_sq(d) / (2.0 * t);
      if (f_new <= model + 1e-13 * (1.0 + std::abs(fx))) break;
      t *= 0.5;
      if (t < 1e-18)
        throw std::runtime_error("generic_prox: non-decrease detected");
    }
    if (f_new > fx + 1e-10 * (1.0 + std::abs(fx)))
      throw std::runtime_error("generic_prox: non-decrease detected");
    x = std::move(x_new);
    fx = f_new;
  }
  throw std::runtime_error("generic_prox: iteration budget exhausted");
}

ReferenceSolution reference_run(const CopInstance& problem,
                                const BlockPreconditioner& p, double sigma,
                                const std::function<double(const Wpoint&)>& residual,
                                double tol, std::size_t max_iters,
                                std::size_t check_every) {
  (void)p;
  ReferenceSolution ref;
  IterateState state =
      make_initial_state(wp_zeros(problem.dim_y, problem.dim_z, problem.dim_x));
  ref.w = state.w;
  ref.residual = residual(state.w);
  if (ref.residual <= tol) {
    ref.converged = true;
    return ref;
  }
  for (std::size_t k = 0; k < max_iters; ++k) {
    state = padmm_iterate(problem, state, sigma, 1.0);
    if ((k + 1) % check_every == 0 || k + 1 == max_iters) {
      const double r = residual(state.w_bar);
      ref.iterations = k + 1;
      if (r < ref.residual) {
        ref.residual = r;
        ref.w = state.w_bar;
      }
      if (r <= tol) {
        ref.converged = true;
        ref.w = state.w_bar;
        ref.residual = r;
        return ref;
      }
    }
  }
  return ref;  // flagged: converged == false
}

ReferenceSolution reference_run_lp(const LpInstance& lp, double sigma, double tol,
                                   std::size_t max_iters) {
  const SparseMatrix a = stack_rows(lp);
  const double lambda1 = estimate_lambda1(a);
  const DualCop dual = dualize(lp, sigma, lambda1);
  auto residual = [&lp](const Wpoint& w) {
    return optimality_measure(lp, w.x, w.y, w.z);
  };
  return reference_run(dual.cop, dual.precond, sigma, residual, tol, max_iters);
}

double certify_lp_kkt(const LpInstance& lp, const Wpoint& w, double tol) {
  const double measure = optimality_measure(lp, w.x, w.y, w.z);
  if (!(measure <= tol))
    throw std::runtime_error("certify_lp_kkt: candidate fails the measure");
  return measure;
}

}  // namespace padmm
