#include "padmm/restart.hpp"

#include <cmath>

namespace padmm {

void RestartPolicy::validate() const {
  if (kind == RestartKind::fixed_period && period < 1)
    throw std::invalid_argument("restart: period must be at least 1");
  if (kind == RestartKind::adaptive_decay) {
    if (!(sufficient_factor > 0.0 && sufficient_factor < 1.0))
      throw std::invalid_argument("restart: sufficient factor must lie in (0,1)");
    if (!(necessary_factor > sufficient_factor && necessary_factor < 1.0))
      throw std::invalid_argument(
          "restart: necessary factor must lie in (sufficient, 1)");
  }
}

void EpochState::start_epoch(double merit0) {
  ++epoch_index;
  k_in_epoch = 0;
  merit_at_epoch_start = merit0;
  best_merit_in_epoch = merit0;
  last_merit = merit0;
}

std::string to_string(RestartReason r) {
  switch (r) {
    case RestartReason::none: return "none";
    case RestartReason::sufficient_decay: return "sufficient_decay";
    case RestartReason::necessary_stall: return "necessary_stall";
    case RestartReason::artificial_cap: return "artificial_cap";
    case RestartReason::period: return "period";
  }
  return "unknown";
}

RestartDecision observe_and_decide(const RestartPolicy& policy, EpochState& epoch,
                                   double merit_current) {
  if (std::isnan(merit_current))
    throw std::runtime_error("restart: merit is NaN");
  policy.validate();

  const double previous = epoch.last_merit;
  epoch.last_merit = merit_current;
  epoch.best_merit_in_epoch = std::min(epoch.best_merit_in_epoch, merit_current);

  if (policy.kind == RestartKind::none) return {};
  if (epoch.k_in_epoch < policy.min_epoch_len) return {};

  if (policy.kind == RestartKind::fixed_period) {
    if (epoch.k_in_epoch >= policy.period) return {true, RestartReason::period};
    return {};
  }

  const double start = epoch.merit_at_epoch_start;
  if (merit_current <= policy.sufficient_factor * start)
    return {true, RestartReason::sufficient_decay};
  if (merit_current <= policy.necessary_factor * start && merit_current > previous)
    return {true, RestartReason::necessary_stall};
  if (policy.artificial_cap > 0 && epoch.k_in_epoch >= policy.artificial_cap)
    return {true, RestartReason::artificial_cap};
  return {};
}

std::pair<IterateState, ErgodicAccumulator> apply_restart(
    const CopInstance& problem, const IterateState& state,
    const ErgodicAccumulator& acc, RestartTarget target) {
  if (acc.n == 0) throw std::logic_error("restart: empty accumulator");
  Wpoint w0 = target == RestartTarget::average ? acc.wbar_avg() : state.w;
  return {make_initial_state(std::move(w0)), make_accumulator(problem)};
}

}  // namespace padmm
