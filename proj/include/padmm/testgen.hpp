#pragma once

#include <cstdint>

#include "padmm/dense.hpp"
#include "padmm/lp.hpp"
#include "padmm/splitting.hpp"

namespace padmm {

// Random instances with certificates: every generated problem carries the
// saddle point it was built around, so a-priori distance quantities are
// available to tests without a solve.

struct LpGenOptions {
  std::size_t n = 10;
  std::size_t m1 = 3;  // equality rows
  std::size_t m2 = 4;  // inequality rows
  double density = 0.5;
  double boxed_fraction = 0.8;  // remaining variables get one-sided bounds
  double margin = 0.1;          // strict-complementarity margin
  std::uint64_t seed = 1;
};

struct GeneratedLp {
  LpInstance lp;
  Wpoint w_star;  // (y*, z*, x*): duals, reduced costs, primal point
  double optimal_value = 0.0;  // <c, x*> (no constant)
};

GeneratedLp generate_lp(const LpGenOptions& opts);

// Smooth two-block instance: f1 = 0.5||y - a||^2, f2 = 0.5||z - d||^2 with
// dense couplings and optional diagonal proximal terms. Exercises the
// explicit preconditioner kinds that the LP path never touches.
struct QuadCopOptions {
  std::size_t dim_y = 4;
  std::size_t dim_z = 5;
  std::size_t dim_x = 3;
  bool with_t1 = false;
  bool with_t2 = false;
  std::uint64_t seed = 1;
};

struct GeneratedCop {
  CopInstance cop;
  BlockPreconditioner precond;
  Wpoint w_star;
  double optimal_value = 0.0;  // f1(y*) + f2(z*)
  DenseMatrix b1, b2;
  Vec t1_diag, t2_diag;  // empty when absent
  Vec a_center, d_center;

  /// Saddle operator value at w (single-valued for this smooth family).
  Wpoint saddle_operator(const Wpoint& w) const;
  /// Max norm of the saddle operator components at w_star; ~0 certifies it.
  double kkt_residual(const Wpoint& w) const;
};

GeneratedCop generate_quad_cop(const QuadCopOptions& opts);

// One-dimensional instance min delta_{0}(z) s.t. y + z = 0 with f1 = 0.
// Its iterates admit closed forms, making it the exact regression anchor:
// the relaxed point-wise sequence oscillates or diverges while the averaged
// half-iterates converge.
struct ScalarConsensusCop {
  CopInstance cop;
  BlockPreconditioner precond;
  Wpoint w_star;  // (0, 0, 0)
};

ScalarConsensusCop make_scalar_consensus_cop();

}  // namespace padmm
