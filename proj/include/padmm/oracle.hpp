#pragma once

#include <functional>

#include "padmm/lp.hpp"
#include "padmm/splitting.hpp"

namespace padmm {

// Desk-scale ground truth: exact tiny-LP optima by basic-point enumeration,
// a tight reference splitting run, and a generic projected-gradient
// minimizer used to certify the closed-form subproblem solvers.

enum class TinyLpStatus { optimal, infeasible, unbounded };

struct TinyLpSolution {
  TinyLpStatus status = TinyLpStatus::infeasible;
  Vec x;
  double value = 0.0;
};

/// Enumerates basic points (active-set combinations of rows and bounds) of
/// instances with n, m <= 12. Infinite bounds are clipped at +-1e8 for the
/// enumeration; an optimum resting on a synthetic clip reports unbounded.
TinyLpSolution solve_tiny_lp(const LpInstance& lp);

struct ProxProblem {
  std::function<double(const Vec&)> value;
  std::function<Vec(const Vec&)> gradient;
  std::function<Vec(const Vec&)> project;  // null means unconstrained
};

/// Projected-gradient descent with backtracking for strongly convex
/// objectives. Returns a point whose unit-step projected-gradient residual
/// is at most tol. Throws when descent stalls or iterations run out.
Vec generic_prox(const ProxProblem& problem, Vec x0, double tol,
                 std::size_t max_iters = 100000);

struct ReferenceSolution {
  bool converged = false;
  Wpoint w;           // half-iterate triple at the final check
  double residual = kInf;
  std::size_t iterations = 0;
};

/// Unrelaxed reference run (rho = 1) from the zero start, stopping when
/// residual(wbar) <= tol. The caller supplies the residual functional.
ReferenceSolution reference_run(const CopInstance& problem,
                                const BlockPreconditioner& p, double sigma,
                                const std::function<double(const Wpoint&)>& residual,
                                double tol, std::size_t max_iters,
                                std::size_t check_every = 25);

/// LP wrapper: residual is the relative optimality measure of (x,y,z) read
/// off the half-iterate. Falls below 1e-11 on the nondegenerate desk-scale
/// instances this oracle is meant for; callers must skip dependent checks
/// when `converged` is false.
ReferenceSolution reference_run_lp(const LpInstance& lp, double sigma,
                                   double tol = 1e-11,
                                   std::size_t max_iters = 1000000);

/// Validates a KKT candidate through the optimality measure; throws if the
/// measure exceeds tol. Returns the measure.
double certify_lp_kkt(const LpInstance& lp, const Wpoint& w, double tol = 1e-11);

}  // namespace padmm
