#include "padmm/solver.hpp"

#include <algorithm>
#include <cmath>

namespace padmm {

Variant variant_from_string(const std::string& s) {
  if (s == "pr") return Variant::pr;
  if (s == "dr") return Variant::dr;
  if (s == "epr") return Variant::epr;
  if (s == "edr") return Variant::edr;
  if (s == "repr") return Variant::repr;
  if (s == "redr") return Variant::redr;
  if (s == "custom") return Variant::custom;
  throw std::invalid_argument("unknown variant '" + s + "'");
}

std::string to_string(Variant v) {
  switch (v) {
    case Variant::pr: return "pr";
    case Variant::dr: return "dr";
    case Variant::epr: return "epr";
    case Variant::edr: return "edr";
    case Variant::repr: return "repr";
    case Variant::redr: return "redr";
    case Variant::custom: return "custom";
  }
  return "unknown";
}

SolverConfig SolverConfig::for_variant(Variant v) {
  SolverConfig c;
  c.variant = v;
  c.apply_variant_defaults();
  return c;
}

void SolverConfig::apply_variant_defaults() {
  switch (variant) {
    case Variant::pr:
      rho = 2.0; candidate = CandidateKind::pointwise; restart.kind = RestartKind::none;
      break;
    case Variant::dr:
      rho = 1.0; candidate = CandidateKind::pointwise; restart.kind = RestartKind::none;
      break;
    case Variant::epr:
      rho = 2.0; candidate = CandidateKind::ergodic; restart.kind = RestartKind::none;
      break;
    case Variant::edr:
      rho = 1.0; candidate = CandidateKind::ergodic; restart.kind = RestartKind::none;
      break;
    case Variant::repr:
      rho = 2.0; candidate = CandidateKind::ergodic;
      restart.kind = RestartKind::adaptive_decay;
      break;
    case Variant::redr:
      rho = 1.0; candidate = CandidateKind::ergodic;
      restart.kind = RestartKind::adaptive_decay;
      break;
    case Variant::custom:
      break;
  }
}

void SolverConfig::validate() const {
  if (!(sigma > 0.0)) throw std::invalid_argument("config: sigma must be positive");
  if (!(rho > 0.0 && rho <= 2.0))
    throw std::invalid_argument("config: rho must lie in (0,2]");
  if (!(tol > 0.0)) throw std::invalid_argument("config: tol must be positive");
  if (log_every == 0) throw std::invalid_argument("config: log_every must be >= 1");
  restart.validate();
}

LpSolveResult solve_lp(const LpInstance& lp, const SolverConfig& config_in) {
  SolverConfig config = config_in;
  // cap == 0 asks for the default fraction of the iteration budget
  if (config.restart.kind == RestartKind::adaptive_decay &&
      config.restart.artificial_cap == 0)
    config.restart.artificial_cap = std::max<std::size_t>(
        config.restart.min_epoch_len,
        static_cast<std::size_t>(0.36 * static_cast<double>(config.max_iters)));
  config.validate();
  lp.validate();

  LpSolveResult result;
  const SparseMatrix a = stack_rows(lp);
  Lambda1Options lopts;
  lopts.seed = config.seed;
  double lambda1;
  try {
    lambda1 = estimate_lambda1(a, lopts);
  } catch (const PowerIterationError& e) {
    lambda1 = e.best_estimate;  // safety factor still applied; PSD may be loose
  }
  result.lambda1 = lambda1;

  const DualCop dual = dualize(lp, config.sigma, lambda1);
  const Vec b = stack_rhs(lp);

  EpochState epoch;
  bool epoch_started = false;
  bool restart_pending = false;
  double trigger_merit = kInf;

  EngineConfig ecfg;
  ecfg.sigma = config.sigma;
  ecfg.rho = config.rho;
  ecfg.max_iters = config.max_iters;
  ecfg.time_limit_s = config.time_limit_s;

  auto candidate_of = [&](const EngineContext& ctx) -> Wpoint {
    if (config.candidate == CandidateKind::ergodic && ctx.acc.n > 0)
      return ctx.acc.wbar_avg();
    return ctx.state.w_bar;
  };

  EngineHooks hooks;
  hooks.observe = [&](const EngineContext& ctx) -> StepAction {
    epoch.k_in_epoch = ctx.state.k;
    const bool cadence = ctx.total_iters % config.log_every == 0 ||
                         ctx.total_iters == 1 || ctx.total_iters == config.max_iters;
    if (!cadence) return StepAction::proceed;

    const Wpoint cand = candidate_of(ctx);
    const Vec x_meas = config.measure_clamped_x
                           ? project_box(cand.x, lp.lower, lp.upper)
                           : cand.x;
    const OptimalityParts parts = optimality_parts(lp, x_meas, cand.y, cand.z);

    const Wpoint avg = ctx.acc.n > 0 ? ctx.acc.wbar_avg() : ctx.state.w_bar;
    const double merit = merit_rtilde(lp, config.sigma, avg.x, avg.y, avg.z);
    const ErgodicCertificate cert =
        compute_certificate(ctx.acc, dual.cop, dual.precond, config.sigma);
    if (cert.eps_y_clamped) ++result.clamp_events;
    if (cert.eps_z_clamped) ++result.clamp_events;

    MetricRecord rec;
    rec.k = ctx.total_iters;
    rec.epoch = ctx.epoch;
    rec.time_s = ctx.elapsed_s;
    rec.gap_rel = parts.gap_rel;
    rec.pinf_rel = parts.pinf_rel;
    rec.dinf_rel = parts.dinf_rel;
    rec.merit = merit;
    rec.feas = cert.feas_residual;
    rec.eps_y = cert.eps_y;
    rec.eps_z = cert.eps_z;
    rec.restarted = false;

    if (parts.measure() <= config.tol) {
      result.records.push_back(rec);
      return StepAction::stop_optimal;
    }

    if (config.restart.kind != RestartKind::none) {
      if (!epoch_started) {
        epoch.merit_at_epoch_start = merit;
        epoch.best_merit_in_epoch = merit;
        epoch.last_merit = merit;
        epoch_started = true;
      }
      const RestartDecision decision =
          observe_and_decide(config.restart, epoch, merit);
      if (decision.restart) {
        rec.restarted = true;
        result.records.push_back(rec);
        trigger_merit = merit;
        restart_pending = true;
        return StepAction::restart;
      }
    }
    result.records.push_back(rec);
    return StepAction::proceed;
  };
  hooks.restart = [&](const IterateState& state, const ErgodicAccumulator& acc) {
    auto out = apply_restart(dual.cop, state, acc, config.restart_to);
    epoch.start_epoch(trigger_merit);
    restart_pending = false;
    return out;
  };

  const Wpoint w0 = wp_zeros(dual.cop.dim_y, dual.cop.dim_z, dual.cop.dim_x);
  EngineResult er = run(dual.cop, dual.precond, ecfg, w0, hooks);
  (void)restart_pending;

  result.status = er.status;
  result.iterations = er.total_iters;
  result.restarts = er.epochs;
  result.solve_time_s = er.elapsed_s;
  result.message = er.message;

  // designated candidate, with the final box clamp applied to the reported x
  Wpoint cand;
  if (config.candidate == CandidateKind::ergodic && er.acc.n > 0)
    cand = er.acc.wbar_avg();
  else
    cand = er.state.w_bar;
  result.y = cand.y;
  result.z = cand.z;
  const Vec x_clamped = project_box(cand.x, lp.lower, lp.upper);
  result.clamp_magnitude = norm2(sub(x_clamped, cand.x));
  result.x = x_clamped;

  const Vec x_meas = config.measure_clamped_x ? result.x : cand.x;
  result.final_parts = optimality_parts(lp, x_meas, result.y, result.z);
  result.final_measure = result.final_parts.measure();
  result.objective = dot(lp.cost, result.x) + lp.objective_constant;
  result.dual_objective =
      result.final_parts.gap_infinite
          ? -kInf
          : result.final_parts.dual_obj + lp.objective_constant;
  if (er.acc.n > 0) {
    const Wpoint avg = er.acc.wbar_avg();
    result.final_merit = merit_rtilde(lp, config.sigma, avg.x, avg.y, avg.z);
  }

  // close the log with the terminal state unless the cadence just did
  if (result.records.empty() || result.records.back().k != result.iterations) {
    MetricRecord rec;
    rec.k = result.iterations;
    rec.epoch = er.epochs;
    rec.time_s = er.elapsed_s;
    rec.gap_rel = result.final_parts.gap_rel;
    rec.pinf_rel = result.final_parts.pinf_rel;
    rec.dinf_rel = result.final_parts.dinf_rel;
    rec.merit = result.final_merit;
    if (er.acc.n > 0) {
      const ErgodicCertificate cert =
          compute_certificate(er.acc, dual.cop, dual.precond, config.sigma);
      rec.feas = cert.feas_residual;
      rec.eps_y = cert.eps_y;
      rec.eps_z = cert.eps_z;
    }
    if (result.iterations > 0) result.records.push_back(rec);
  }
  (void)b;
  return result;
}

}  // namespace padmm
