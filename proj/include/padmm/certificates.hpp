#pragma once

#include "padmm/splitting.hpp"

namespace padmm {

// Residual certificates of the averaged half-iterate: the averaged
// subgradient elements g_y_avg, g_z_avg lie in the eps-subdifferentials of
// f1, f2 at the averaged point with the slacks eps_y, eps_z, and
// eps_y + eps_z equals the epsilon of certificate_epsilon_a up to round-off.
struct ErgodicCertificate {
  std::size_t k = 0;  // iterations accumulated minus one
  double eps_y = 0.0, eps_z = 0.0;          // clamped at zero
  double eps_y_raw = 0.0, eps_z_raw = 0.0;  // signed values
  bool eps_y_clamped = false, eps_z_clamped = false;
  Vec g_y_avg, g_z_avg;
  double feas_residual = 0.0;     // ||B1 ybar_a + B2 zbar_a - c||
  double objective_value = 0.0;   // f1 + f2 at the averaged point, extended real
  double objective_error = 0.0;   // value minus the reference optimum; NaN if unknown
};

/// reference_optimal_value: pass the oracle optimum f1(y*)+f2(z*) to obtain
/// objective_error; NaN leaves the error field NaN.
ErgodicCertificate compute_certificate(
    const ErgodicAccumulator& acc, const CopInstance& problem,
    const BlockPreconditioner& p, double sigma,
    double reference_optimal_value = std::numeric_limits<double>::quiet_NaN());

// A-priori right-hand sides at iteration k for a run started at distance
// r0 = ||w0 - w*||_M from a solution. All three scale as 1/rho, so the
// relaxed method's bounds at rho = 2 are exactly half the rho = 1 ones.
struct BoundSet {
  double kkt_composite = 0.0;  // subdifferential distances plus feasibility
  double feasibility = 0.0;    // ||B1 ybar_a + B2 zbar_a - c||
  double eps_sum = 0.0;        // eps_y + eps_z
};

struct OperatorNorms {
  double b1_adj = 0.0;   // ||B1*||
  double sqrt_t1 = 0.0;  // ||T1^(1/2)||
  double sqrt_t2 = 0.0;  // ||T2^(1/2)||
};

BoundSet theorem_bounds(double r0, double sigma, double rho, std::size_t k,
                        const OperatorNorms& norms);

struct ObjectiveErrorBounds {
  double lower = 0.0;
  double upper = 0.0;
};

/// Interval containing f1(ybar_a)+f2(zbar_a) - (f1(y*)+f2(z*)) at iteration k.
/// The oracle quantities ||x*||, ||B1 y*|| and ||x0 + sigma B1 y0|| come from
/// test harnesses; they are not computable during a production solve.
ObjectiveErrorBounds objective_error_bounds(double r0, double sigma, double rho,
                                            std::size_t k, double x_star_norm,
                                            double b1_y_star_norm,
                                            double x0_plus_sigma_b1_y0_norm);

}  // namespace padmm
