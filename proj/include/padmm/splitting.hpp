#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>

#include "padmm/linalg.hpp"

namespace padmm {

// ---------------------------------------------------------------------------
// Two-block problem
//
//   min f1(y) + f2(z)  s.t.  B1 y + B2 z = c
//
// described through operator handles and subproblem solvers. The solver
// callbacks must return the exact minimizers of the proximal augmented
// Lagrangian subproblems; the oracle tests certify this for every instance
// family shipped here. Instances are immutable after construction and safe
// to share across threads.
// ---------------------------------------------------------------------------

struct CopInstance {
  std::size_t dim_y = 0, dim_z = 0, dim_x = 0;

  std::function<Vec(const Vec&)> apply_b1;      // Y -> X
  std::function<Vec(const Vec&)> apply_b1_adj;  // X -> Y
  std::function<Vec(const Vec&)> apply_b2;      // Z -> X
  std::function<Vec(const Vec&)> apply_b2_adj;  // X -> Z
  Vec c;

  /// (y^k, z^k, x^k, sigma) -> zbar^k
  std::function<Vec(const Vec&, const Vec&, const Vec&, double)> solve_z;
  /// (y^k, zbar^k, xbar^k, sigma) -> ybar^k
  std::function<Vec(const Vec&, const Vec&, const Vec&, double)> solve_y;

  std::function<double(const Vec&)> eval_f1;  // extended real, may be +inf
  std::function<double(const Vec&)> eval_f2;

  std::function<Vec(const Vec&)> apply_t1;  // null means the zero operator
  std::function<Vec(const Vec&)> apply_t2;

  Vec t1_or_zero(const Vec& v) const { return apply_t1 ? apply_t1(v) : zeros(v.size()); }
  Vec t2_or_zero(const Vec& v) const { return apply_t2 ? apply_t2(v) : zeros(v.size()); }

  void check_point(const Wpoint& w) const;
};

struct IterationError : std::runtime_error {
  IterationError(std::size_t k, const std::string& what)
      : std::runtime_error("iteration " + std::to_string(k) + ": " + what),
        iteration(k) {}
  std::size_t iteration;
};

// w carries the current iterate, w_bar the latest half-iterate, w_prev the
// iterate the half-iterate was computed from. k counts completed iterations.
struct IterateState {
  std::size_t k = 0;
  Wpoint w;
  Wpoint w_bar;
  Wpoint w_prev;
};

IterateState make_initial_state(Wpoint w0);

/// One full iteration: z-subproblem, multiplier update
/// xbar = x + sigma (B1 y + B2 zbar - c) evaluated literally, y-subproblem,
/// then relaxation w <- (1-rho) w + rho wbar. rho in (0,2], sigma > 0.
IterateState padmm_iterate(const CopInstance& problem, const IterateState& state,
                           double sigma, double rho);

// ---------------------------------------------------------------------------
// Running averages and certificate sums. Everything is O(1) memory per
// iteration: the epsilon quantities are accumulated in the rearranged form
//   sum_t <g^t, s^t> - <sum_t g^t, s_avg>
// so no iterate history is kept.
// ---------------------------------------------------------------------------

struct ErgodicAccumulator {
  std::size_t n = 0;  // accumulated iterations
  Wpoint sum_w, sum_wbar;

  double cert_inner_sum = 0.0;  // sum <wbar^t, M(w^t - wbar^t)>
  Wpoint cert_vec_sum;          // sum M(w^t - wbar^t)

  double sum_gz_inner = 0.0;  // sum <g_z^t, zbar^t>
  Vec sum_gz_vec;             // sum g_z^t
  double sum_gy_inner = 0.0;
  Vec sum_gy_vec;

  Wpoint w_avg() const;
  Wpoint wbar_avg() const;
};

ErgodicAccumulator make_accumulator(const CopInstance& problem);

/// Folds (w^{k-1}, wbar^{k-1}) of a state just produced by padmm_iterate into
/// the running sums, together with M(w-wbar) and the subgradient elements
///   g_z^t = -B2* xbar^t - T2 (zbar^t - z^t)
///   g_y^t = -B1* (xbar^t + sigma (B1 ybar^t + B2 zbar^t - c)) - T1 (ybar^t - y^t)
/// the latter evaluated through the multiplier-update identity as
/// -B1*(2 xbar^t - x^t) - (sigma B1*B1 + T1)(ybar^t - y^t).
void ergodic_accumulate(ErgodicAccumulator& acc, const CopInstance& problem,
                        const BlockPreconditioner& p, const IterateState& state,
                        double sigma);

struct EpsilonCertificate {
  double epsilon = 0.0;      // clamped at zero
  double epsilon_raw = 0.0;  // signed value before the clamp
  bool clamped = false;
  Wpoint v;  // M(w_avg - wbar_avg)
};

/// Certificate for the averaged half-iterate: v lies in the epsilon
/// enlargement of the saddle operator at wbar_avg with slack epsilon.
EpsilonCertificate certificate_epsilon_a(const ErgodicAccumulator& acc,
                                         const BlockPreconditioner& p);

// ---------------------------------------------------------------------------
// Driver loop.
// ---------------------------------------------------------------------------

enum class SolveStatus { optimal, iteration_limit, time_limit, error };

std::string to_string(SolveStatus s);

struct EngineConfig {
  double sigma = 1.0;
  double rho = 2.0;
  std::size_t max_iters = 100000;
  double time_limit_s = 3600.0;
};

enum class StepAction { proceed, stop_optimal, restart };

struct EngineContext {
  const IterateState& state;
  const ErgodicAccumulator& acc;
  std::size_t total_iters;
  std::size_t epoch;
  double elapsed_s;
};

struct EngineHooks {
  /// Called after every iteration. Null runs to the limits.
  std::function<StepAction(const EngineContext&)> observe;
  /// Invoked when observe asks for a restart; must hand back the new state
  /// and a reset accumulator.
  std::function<std::pair<IterateState, ErgodicAccumulator>(
      const IterateState&, const ErgodicAccumulator&)>
      restart;
};

struct EngineResult {
  SolveStatus status = SolveStatus::iteration_limit;
  IterateState state;
  ErgodicAccumulator acc;
  std::size_t total_iters = 0;
  std::size_t epochs = 0;  // number of restarts performed
  double elapsed_s = 0.0;
  std::string message;
};

EngineResult run(const CopInstance& problem, const BlockPreconditioner& p,
                 const EngineConfig& config, Wpoint w0,
                 const EngineHooks& hooks = {});

}  // namespace padmm
