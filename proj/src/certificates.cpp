#include "padmm/certificates.hpp"

#include <cmath>

namespace padmm {

ErgodicCertificate compute_certificate(const ErgodicAccumulator& acc,
                                       const CopInstance& problem,
                                       const BlockPreconditioner& p, double sigma,
                                       double reference_optimal_value) {
  if (acc.n == 0) throw std::logic_error("empty accumulator");
  (void)sigma;
  const double n = static_cast<double>(acc.n);
  const Wpoint wbar_a = acc.wbar_avg();

  ErgodicCertificate cert;
  cert.k = acc.n - 1;
  cert.eps_z_raw = (acc.sum_gz_inner - dot(acc.sum_gz_vec, wbar_a.z)) / n;
  cert.eps_y_raw = (acc.sum_gy_inner - dot(acc.sum_gy_vec, wbar_a.y)) / n;
  cert.eps_z_clamped = cert.eps_z_raw < 0.0;
  cert.eps_y_clamped = cert.eps_y_raw < 0.0;
  cert.eps_z = std::max(cert.eps_z_raw, 0.0);
  cert.eps_y = std::max(cert.eps_y_raw, 0.0);
  cert.g_z_avg = scaled(acc.sum_gz_vec, 1.0 / n);
  cert.g_y_avg = scaled(acc.sum_gy_vec, 1.0 / n);

  Vec feas = problem.apply_b1(wbar_a.y);
  add_scaled(feas, 1.0, problem.apply_b2(wbar_a.z));
  add_scaled(feas, -1.0, problem.c);
  cert.feas_residual = norm2(feas);

  cert.objective_value = problem.eval_f1(wbar_a.y) + problem.eval_f2(wbar_a.z);
  cert.objective_error = std::isnan(reference_optimal_value)
                             ? std::numeric_limits<double>::quiet_NaN()
                             : cert.objective_value - reference_optimal_value;
  (void)p;
  return cert;
}

BoundSet theorem_bounds(double r0, double sigma, double rho, std::size_t k,
                        const OperatorNorms& norms) {
  if (r0 < 0.0 || sigma <= 0.0 || rho <= 0.0)
    throw std::invalid_argument("theorem_bounds: invalid inputs");
  const double denom = rho * static_cast<double>(k + 1);
  BoundSet b;
  b.feasibility = 2.0 * r0 / (std::sqrt(sigma) * denom);
  b.eps_sum = r0 * r0 / (2.0 * denom);
  const double factor =
      (sigma * norms.b1_adj + 1.0) / std::sqrt(sigma) + norms.sqrt_t2 + norms.sqrt_t1;
  b.kkt_composite = factor * (2.0 * r0 / denom);
  return b;
}

ObjectiveErrorBounds objective_error_bounds(double r0, double sigma, double rho,
                                            std::size_t k, double x_star_norm,
                                            double b1_y_star_norm,
                                            double x0_plus_sigma_b1_y0_norm) {
  if (r0 < 0.0 || sigma <= 0.0 || rho <= 0.0)
    throw std::invalid_argument("objective_error_bounds: invalid inputs");
  const double denom = rho * static_cast<double>(k + 1);
  ObjectiveErrorBounds b;
  b.lower = -(x_star_norm / std::sqrt(sigma)) * (2.0 * r0 / denom);
  const double t1 = (r0 + 4.0 * std::sqrt(sigma) * b1_y_star_norm) * r0;
  const double t2 = x0_plus_sigma_b1_y0_norm * x0_plus_sigma_b1_y0_norm;
  b.upper = (t1 + t2) / (2.0 * denom);
  return b;
}

}  // namespace padmm
