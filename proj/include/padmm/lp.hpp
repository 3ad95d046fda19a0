#pragma once

#include <memory>
#include <string>
#include <vector>

#include "padmm/linalg.hpp"
#include "padmm/splitting.hpp"

namespace padmm {

// ---------------------------------------------------------------------------
//   min <c,x>  s.t.  A1 x = b1,  A2 x >= b2,  l <= x <= u
//
// Inequalities are normalized to ">=" when the instance is built (mps_io
// negates "<=" rows and splits ranged rows).
// ---------------------------------------------------------------------------

struct LpInstance {
  std::string name = "lp";
  SparseMatrix a_eq;  // m1 x n
  SparseMatrix a_ge;  // m2 x n
  Vec b_eq, b_ge;
  Vec cost;
  Vec lower, upper;  // entries may be +-inf
  double objective_constant = 0.0;
  std::vector<std::string> row_names_eq, row_names_ge, col_names;

  std::size_t num_vars() const { return cost.size(); }
  std::size_t num_eq() const { return b_eq.size(); }
  std::size_t num_ge() const { return b_ge.size(); }
  std::size_t num_rows() const { return num_eq() + num_ge(); }

  /// Checks dimensions, l <= u, and that the stacked matrix is nonzero.
  void validate() const;
};

SparseMatrix stack_rows(const LpInstance& lp);
Vec stack_rhs(const LpInstance& lp);

/// Support function of the box evaluated at -z:
///   sum_i sup { -z_i t : l_i <= t <= u_i }
/// with finiteness branching so that 0*inf is never formed. Never NaN.
double support_c(const Vec& z, const Vec& lower, const Vec& upper);

// ---------------------------------------------------------------------------
// Saddle formulation solved by the splitting engine:
//
//   min -<b,y> + delta_D(y) + delta_C^*(-z)  s.t.  A* y + z = c
//
// with D = R^{m1} x R^{m2}_+, B1 = A*, B2 = I, T1 = sigma (lambda1 I - A A*),
// T2 = 0. Both subproblems collapse to single projections; the multiplier
// block x tracks the original variables.
// ---------------------------------------------------------------------------

struct DualCop {
  CopInstance cop;
  BlockPreconditioner precond;
  double sigma = 1.0;
  double lambda1 = 0.0;
  std::size_t m1 = 0;

  // shared with the closures inside cop
  struct Data {
    SparseMatrix a;  // stacked [A1; A2], m x n
    Vec b;           // stacked rhs
    Vec c;
    Vec lower, upper;
    std::size_t m1 = 0;
    double sigma = 1.0;
    double lambda1 = 0.0;
  };
  std::shared_ptr<const Data> data;
};

/// Requires lambda1_hat >= lambda_1(A A*) so the proximal term stays PSD.
DualCop dualize(const LpInstance& lp, double sigma, double lambda1_hat);

/// Closed forms for the z-subproblem and the multiplier update:
///   p = x + sigma (A* y - c),  zbar = (Pi_C(p) - p)/sigma,
///   xbar = x + sigma (A* y + zbar - c)  (evaluated literally).
std::pair<Vec, Vec> z_x_update(const DualCop& dual, const Vec& y, const Vec& x);

/// Closed form for the y-subproblem: because sigma B1*B1 + T1 collapses to
/// sigma lambda1 I, the minimizer is a single cone projection
///   ybar = Pi_D(y - (A (xbar + sigma (A* y + zbar - c)) - b)/(sigma lambda1)).
Vec y_update(const DualCop& dual, const Vec& y_prev, const Vec& zbar, const Vec& xbar);

// ---------------------------------------------------------------------------
// Residual measures.
// ---------------------------------------------------------------------------

struct OptimalityParts {
  double gap_rel = 0.0;   // finite; set to 1 when the raw gap is infinite
  double pinf_rel = 0.0;
  double dinf_rel = 0.0;
  bool gap_infinite = false;
  double primal_obj = 0.0;  // <c,x>, no constant
  double dual_obj = 0.0;    // <b,y> - delta_C^*(-z); -inf when support blows up
  double measure() const;   // max of the three parts (+inf if gap_infinite)
};

OptimalityParts optimality_parts(const LpInstance& lp, const Vec& x, const Vec& y,
                                 const Vec& z);
double optimality_measure(const LpInstance& lp, const Vec& x, const Vec& y,
                          const Vec& z);

/// Combined infeasibility of the averaged candidate,
///   sqrt( ||Pi_D(b - A x)||^2 / sigma + sigma ||c - A* y - z||^2 ).
double merit_rtilde(const LpInstance& lp, double sigma, const Vec& x_avg,
                    const Vec& y_avg, const Vec& z_avg);

}  // namespace padmm
