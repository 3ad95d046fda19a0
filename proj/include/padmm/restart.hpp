#pragma once

#include <string>
#include <utility>

#include "padmm/splitting.hpp"

namespace padmm {

enum class RestartKind { none, fixed_period, adaptive_decay };

struct RestartPolicy {
  RestartKind kind = RestartKind::none;
  std::size_t period = 100;           // fixed_period
  double sufficient_factor = 0.2;     // adaptive: restart on strong merit decay
  double necessary_factor = 0.8;      // adaptive: decay needed before a stall counts
  std::size_t artificial_cap = 0;     // adaptive: epoch length cap; 0 disables
  std::size_t min_epoch_len = 10;

  void validate() const;
};

struct EpochState {
  std::size_t epoch_index = 0;
  std::size_t k_in_epoch = 0;          // advanced by the driver
  double merit_at_epoch_start = kInf;
  double best_merit_in_epoch = kInf;
  double last_merit = kInf;            // value at the previous check

  void start_epoch(double merit0);
};

enum class RestartReason { none, sufficient_decay, necessary_stall, artificial_cap, period };

std::string to_string(RestartReason r);

struct RestartDecision {
  bool restart = false;
  RestartReason reason = RestartReason::none;
};

/// Merit-driven restart test, called at check points. fixed_period fires
/// once the epoch reaches `period`; adaptive_decay fires on sufficient decay,
/// on decay-then-increase (stall), or at the artificial cap. Neither fires
/// before min_epoch_len. Throws on NaN merit.
RestartDecision observe_and_decide(const RestartPolicy& policy, EpochState& epoch,
                                   double merit_current);

enum class RestartTarget { average, last };

/// Hands back a fresh state seeded at the averaged half-iterate (or at the
/// current iterate for target == last) and an empty accumulator.
std::pair<IterateState, ErgodicAccumulator> apply_restart(
    const CopInstance& problem, const IterateState& state,
    const ErgodicAccumulator& acc, RestartTarget target = RestartTarget::average);

}  // namespace padmm
