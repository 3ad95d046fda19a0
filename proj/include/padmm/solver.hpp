#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "padmm/certificates.hpp"
#include "padmm/lp.hpp"
#include "padmm/restart.hpp"
#include "padmm/splitting.hpp"

namespace padmm {

// Variant shorthands: relaxed (rho = 2) and unrelaxed (rho = 1) runs, their
// averaged candidates, and the restarted averaged candidates.
enum class Variant { pr, dr, epr, edr, repr, redr, custom };

Variant variant_from_string(const std::string& s);
std::string to_string(Variant v);

enum class CandidateKind { pointwise, ergodic };

struct SolverConfig {
  Variant variant = Variant::repr;
  double rho = 2.0;
  CandidateKind candidate = CandidateKind::ergodic;
  RestartPolicy restart;
  RestartTarget restart_to = RestartTarget::average;
  double sigma = 1.0;
  double tol = 1e-8;
  std::size_t max_iters = 1000000;
  double time_limit_s = 3600.0;
  bool deterministic = true;
  std::uint64_t seed = 0;
  std::size_t log_every = 10;
  bool measure_clamped_x = false;  // clamp x into the box before measuring

  /// Fills rho/candidate/restart from the variant (custom leaves them alone)
  /// and resolves the adaptive epoch cap against max_iters.
  static SolverConfig for_variant(Variant v);
  void apply_variant_defaults();
  void validate() const;
};

struct MetricRecord {
  std::size_t k = 0;      // global iteration count
  std::size_t epoch = 0;
  double time_s = 0.0;
  double gap_rel = 0.0;
  double pinf_rel = 0.0;
  double dinf_rel = 0.0;
  double merit = 0.0;
  double feas = 0.0;
  double eps_y = 0.0;
  double eps_z = 0.0;
  bool restarted = false;
};

struct LpSolveResult {
  SolveStatus status = SolveStatus::error;
  std::size_t iterations = 0;
  std::size_t restarts = 0;
  double solve_time_s = 0.0;

  Vec x, y, z;              // reported solution; x carries the final box clamp
  double clamp_magnitude = 0.0;
  double objective = 0.0;       // <c,x> + constant
  double dual_objective = 0.0;  // <b,y> - support + constant
  OptimalityParts final_parts;
  double final_measure = kInf;
  double final_merit = kInf;
  double lambda1 = 0.0;

  std::vector<MetricRecord> records;
  std::size_t clamp_events = 0;  // negative certificate values clamped to zero
  std::string message;
};

LpSolveResult solve_lp(const LpInstance& lp, const SolverConfig& config);

}  // namespace padmm
