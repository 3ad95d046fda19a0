#include "padmm/splitting.hpp"

#include <chrono>
#include <cmath>

namespace padmm {

void CopInstance::check_point(const Wpoint& w) const {
  if (w.y.size() != dim_y || w.z.size() != dim_z || w.x.size() != dim_x)
    throw std::invalid_argument("point dimensions do not match the problem");
}

IterateState make_initial_state(Wpoint w0) {
  IterateState s;
  s.w = w0;
  s.w_bar = w0;
  s.w_prev = std::move(w0);
  s.k = 0;
  return s;
}

IterateState padmm_iterate(const CopInstance& problem, const IterateState& state,
                           double sigma, double rho) {
  if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be positive");
  if (!(rho > 0.0 && rho <= 2.0)) throw std::invalid_argument("rho must lie in (0,2]");
  problem.check_point(state.w);

  const Wpoint& w = state.w;
  Wpoint wbar;
  try {
    wbar.z = problem.solve_z(w.y, w.z, w.x, sigma);

    // multiplier update, evaluated literally so the identity
    // xbar - x - sigma (B1 y + B2 zbar - c) = 0 holds bit for bit
    Vec residual = problem.apply_b1(w.y);
    add_scaled(residual, 1.0, problem.apply_b2(wbar.z));
    add_scaled(residual, -1.0, problem.c);
    wbar.x = w.x;
    add_scaled(wbar.x, sigma, residual);

    wbar.y = problem.solve_y(w.y, wbar.z, wbar.x, sigma);
  } catch (const std::exception& e) {
    throw IterationError(state.k, e.what());
  }

  if (wp_has_nan(wbar)) throw IterationError(state.k, "half-iterate contains NaN");

  IterateState next;
  next.k = state.k + 1;
  next.w = wp_lincomb(1.0 - rho, w, rho, wbar);
  next.w_bar = std::move(wbar);
  next.w_prev = w;
  if (wp_has_nan(next.w)) throw IterationError(state.k, "iterate contains NaN");
  return next;
}

Wpoint ErgodicAccumulator::w_avg() const {
  if (n == 0) throw std::logic_error("empty accumulator");
  return wp_scaled(sum_w, 1.0 / static_cast<double>(n));
}

Wpoint ErgodicAccumulator::wbar_avg() const {
  if (n == 0) throw std::logic_error("empty accumulator");
  return wp_scaled(sum_wbar, 1.0 / static_cast<double>(n));
}

ErgodicAccumulator make_accumulator(const CopInstance& problem) {
  ErgodicAccumulator acc;
  acc.sum_w = wp_zeros(problem.dim_y, problem.dim_z, problem.dim_x);
  acc.sum_wbar = acc.sum_w;
  acc.cert_vec_sum = acc.sum_w;
  acc.sum_gz_vec = zeros(problem.dim_z);
  acc.sum_gy_vec = zeros(problem.dim_y);
  return acc;
}

void ergodic_accumulate(ErgodicAccumulator& acc, const CopInstance& problem,
                        const BlockPreconditioner& p, const IterateState& state,
                        double sigma) {
  if (state.k == 0)
    throw std::logic_error("accumulate requires a state produced by padmm_iterate");
  const Wpoint& w = state.w_prev;   // w^t
  const Wpoint& wb = state.w_bar;   // wbar^t

  wp_add_scaled(acc.sum_w, 1.0, w);
  wp_add_scaled(acc.sum_wbar, 1.0, wb);

  const Wpoint md = apply_m(p, wp_sub(w, wb));
  acc.cert_inner_sum += wp_dot(wb, md);
  wp_add_scaled(acc.cert_vec_sum, 1.0, md);

  // g_z^t = -B2* xbar - T2 (zbar - z)
  Vec gz = problem.apply_b2_adj(wb.x);
  scale(gz, -1.0);
  add_scaled(gz, -1.0, problem.t2_or_zero(sub(wb.z, w.z)));
  acc.sum_gz_inner += dot(gz, wb.z);
  add_scaled(acc.sum_gz_vec, 1.0, gz);

  // g_y^t = -B1*(2 xbar - x) - (sigma B1*B1 + T1)(ybar - y); equal to the
  // literal -B1*(xbar + sigma(B1 ybar + B2 zbar - c)) - T1(ybar - y) through
  // the multiplier-update identity
  Vec gy = problem.apply_b1_adj(lincomb(2.0, wb.x, -1.0, w.x));
  scale(gy, -1.0);
  add_scaled(gy, -1.0, p.apply_y_block(sub(wb.y, w.y)));
  acc.sum_gy_inner += dot(gy, wb.y);
  add_scaled(acc.sum_gy_vec, 1.0, gy);

  (void)sigma;
  ++acc.n;
}

EpsilonCertificate certificate_epsilon_a(const ErgodicAccumulator& acc,
                                         const BlockPreconditioner& p) {
  if (acc.n == 0) throw std::logic_error("empty accumulator");
  const double n = static_cast<double>(acc.n);
  const Wpoint wbar_a = acc.wbar_avg();
  const double cross = wp_dot(wbar_a, acc.cert_vec_sum);
  EpsilonCertificate cert;
  cert.epsilon_raw = (acc.cert_inner_sum - cross) / n;
  cert.clamped = cert.epsilon_raw < 0.0;
  cert.epsilon = std::max(cert.epsilon_raw, 0.0);
  cert.v = apply_m(p, wp_sub(acc.w_avg(), wbar_a));
  return cert;
}

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::iteration_limit: return "iteration_limit";
    case SolveStatus::time_limit: return "time_limit";
    case SolveStatus::error: return "error";
  }
  return "unknown";
}

EngineResult run(const CopInstance& problem, const BlockPreconditioner& p,
                 const EngineConfig& config, Wpoint w0, const EngineHooks& hooks) {
  if (!(config.sigma > 0.0)) throw std::invalid_argument("sigma must be positive");
  if (!(config.rho > 0.0 && config.rho <= 2.0))
    throw std::invalid_argument("rho must lie in (0,2]");
  problem.check_point(w0);

  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };

  EngineResult result;
  result.state = make_initial_state(std::move(w0));
  result.acc = make_accumulator(problem);
  result.status = SolveStatus::iteration_limit;

  while (true) {
    if (result.total_iters >= config.max_iters) {
      result.status = SolveStatus::iteration_limit;
      break;
    }
    if (elapsed() > config.time_limit_s) {
      result.status = SolveStatus::time_limit;
      break;
    }
    try {
      result.state = padmm_iterate(problem, result.state, config.sigma, config.rho);
      ergodic_accumulate(result.acc, problem, p, result.state, config.sigma);
    } catch (const IterationError& e) {
      result.status = SolveStatus::error;
      result.message = e.what();
      break;
    }
    ++result.total_iters;

    if (hooks.observe) {
      const EngineContext ctx{result.state, result.acc, result.total_iters,
                              result.epochs, elapsed()};
      const StepAction action = hooks.observe(ctx);
      if (action == StepAction::stop_optimal) {
        result.status = SolveStatus::optimal;
        break;
      }
      if (action == StepAction::restart) {
        if (!hooks.restart)
          throw std::logic_error("observer requested a restart without a restart hook");
        auto [state, acc] = hooks.restart(result.state, result.acc);
        result.state = std::move(state);
        result.acc = std::move(acc);
        ++result.epochs;
      }
    }
  }
  result.elapsed_s = elapsed();
  return result;
}

}  // namespace padmm
