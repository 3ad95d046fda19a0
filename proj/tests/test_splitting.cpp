#include <doctest.h>

#include <cmath>
#include <random>

#include "padmm/certificates.hpp"
#include "padmm/oracle.hpp"
#include "padmm/splitting.hpp"
#include "padmm/testgen.hpp"
#include "test_support.hpp"

using namespace padmm;
using namespace padmm::testing;

namespace {

// closed forms for the scalar consensus instance started at (1,0,1), sigma 1
double ybar_exact(double rho, std::size_t k) { return -2.0 * std::pow(1.0 - rho, k); }
double xbar_exact(double rho, std::size_t k) { return 2.0 * std::pow(1.0 - rho, k); }
double y_exact(double rho, std::size_t k) {
  const double lead = k == 0 ? 0.0 : -2.0 * k * rho * std::pow(1.0 - rho, k - 1);
  return lead + std::pow(1.0 - rho, k);
}
double x_exact(double rho, std::size_t k) {
  const double lead = k == 0 ? 0.0 : 2.0 * k * rho * std::pow(1.0 - rho, k - 1);
  return lead + std::pow(1.0 - rho, k);
}
double ybar_avg_exact(double rho, std::size_t k) {
  return -2.0 * (1.0 - std::pow(1.0 - rho, k + 1)) / (rho * (k + 1));
}

}  // namespace

TEST_CASE("scalar consensus iteration matches the closed forms") {
  const ScalarConsensusCop inst = make_scalar_consensus_cop();

  SUBCASE("full relaxation, first step") {
    IterateState s = make_initial_state(Wpoint{{1}, {0}, {1}});
    s = padmm_iterate(inst.cop, s, 1.0, 2.0);
    CHECK(s.w_bar.y[0] == doctest::Approx(-2.0));
    CHECK(s.w_bar.z[0] == 0.0);
    CHECK(s.w_bar.x[0] == doctest::Approx(2.0));
    CHECK(s.w.y[0] == doctest::Approx(-5.0));
    CHECK(s.w.z[0] == 0.0);
    CHECK(s.w.x[0] == doctest::Approx(3.0));
  }

  SUBCASE("no relaxation, first step") {
    IterateState s = make_initial_state(Wpoint{{1}, {0}, {1}});
    s = padmm_iterate(inst.cop, s, 1.0, 1.0);
    CHECK(s.w_bar.y[0] == doctest::Approx(-2.0));
    CHECK(s.w.y[0] == doctest::Approx(-2.0));
    CHECK(s.w.x[0] == doctest::Approx(2.0));
  }

  SUBCASE("the solution is a fixed point") {
    IterateState s = make_initial_state(Wpoint{{0}, {0}, {0}});
    s = padmm_iterate(inst.cop, s, 1.0, 2.0);
    CHECK(s.w_bar.y[0] == 0.0);
    CHECK(s.w_bar.x[0] == 0.0);
    CHECK(s.w.y[0] == 0.0);
    CHECK(s.w.x[0] == 0.0);
  }

  SUBCASE("whole trajectories for several relaxation factors") {
    for (double rho : {2.0, 1.0, 0.5, 1.9}) {
      IterateState s = make_initial_state(Wpoint{{1}, {0}, {1}});
      for (std::size_t k = 0; k < 30; ++k) {
        CHECK(s.w.y[0] == doctest::Approx(y_exact(rho, k)).epsilon(1e-11));
        CHECK(s.w.x[0] == doctest::Approx(x_exact(rho, k)).epsilon(1e-11));
        s = padmm_iterate(inst.cop, s, 1.0, rho);
        CHECK(s.w_bar.y[0] == doctest::Approx(ybar_exact(rho, k)).epsilon(1e-11));
        CHECK(s.w_bar.x[0] == doctest::Approx(xbar_exact(rho, k)).epsilon(1e-11));
        CHECK(s.w_bar.z[0] == 0.0);
      }
    }
  }
}

TEST_CASE("iteration validates its inputs") {
  const ScalarConsensusCop inst = make_scalar_consensus_cop();
  IterateState s = make_initial_state(Wpoint{{1}, {0}, {1}});
  CHECK_THROWS_AS(padmm_iterate(inst.cop, s, 0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(padmm_iterate(inst.cop, s, 1.0, 2.5), std::invalid_argument);
  CHECK_THROWS_AS(padmm_iterate(inst.cop, s, 1.0, 0.0), std::invalid_argument);

  CopInstance bad = inst.cop;
  bad.solve_z = [](const Vec&, const Vec&, const Vec&, double) {
    return Vec{std::nan("")};
  };
  CHECK_THROWS_AS(padmm_iterate(bad, s, 1.0, 1.0), IterationError);
}

TEST_CASE("ergodic averages match the closed forms") {
  const ScalarConsensusCop inst = make_scalar_consensus_cop();

  IterateState s = make_initial_state(Wpoint{{1}, {0}, {1}});
  ErgodicAccumulator acc = make_accumulator(inst.cop);
  for (std::size_t k = 0; k <= 10; ++k) {
    s = padmm_iterate(inst.cop, s, 1.0, 2.0);
    ergodic_accumulate(acc, inst.cop, inst.precond, s, 1.0);
    if (k == 1) {
      CHECK(acc.wbar_avg().y[0] == doctest::Approx(0.0));
      CHECK(acc.wbar_avg().x[0] == doctest::Approx(0.0));
    }
    if (k == 2) CHECK(acc.wbar_avg().y[0] == doctest::Approx(-2.0 / 3.0));
    CHECK(acc.wbar_avg().y[0] ==
          doctest::Approx(ybar_avg_exact(2.0, k)).epsilon(1e-12));
  }
}

TEST_CASE("constant sequences leave all certificate sums at zero") {
  const GeneratedCop inst = generate_quad_cop({});
  // start at the saddle point: every iterate reproduces it
  IterateState s = make_initial_state(inst.w_star);
  ErgodicAccumulator acc = make_accumulator(inst.cop);
  BlockPreconditioner p = inst.precond;
  p.sigma = 1.0;
  for (int k = 0; k < 5; ++k) {
    s = padmm_iterate(inst.cop, s, 1.0, 2.0);
    ergodic_accumulate(acc, inst.cop, p, s, 1.0);
  }
  CHECK(wp_norm2(wp_sub(acc.w_avg(), inst.w_star)) == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(wp_norm2(wp_sub(acc.wbar_avg(), inst.w_star)) ==
        doctest::Approx(0.0).epsilon(1e-10));
  const EpsilonCertificate cert = certificate_epsilon_a(acc, p);
  CHECK(cert.epsilon == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(wp_norm2(cert.v) == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("running certificate equals brute-force history summation") {
  const ScalarConsensusCop scalar = make_scalar_consensus_cop();
  SUBCASE("scalar instance, small k") {
    const History h = run_with_history(scalar.cop, Wpoint{{1}, {0}, {1}}, 1.0, 2.0, 4);
    IterateState s = make_initial_state(Wpoint{{1}, {0}, {1}});
    ErgodicAccumulator acc = make_accumulator(scalar.cop);
    for (std::size_t k = 0; k <= 3; ++k) {
      s = padmm_iterate(scalar.cop, s, 1.0, 2.0);
      ergodic_accumulate(acc, scalar.cop, scalar.precond, s, 1.0);
      const EpsilonCertificate cert = certificate_epsilon_a(acc, scalar.precond);
      const double brute = eps_a_bruteforce(h, scalar.precond, k);
      CHECK(cert.epsilon_raw == doctest::Approx(brute).epsilon(1e-12));
    }
  }

  SUBCASE("random smooth instance, long run, relative 1e-10") {
    QuadCopOptions opts;
    opts.with_t1 = true;
    opts.with_t2 = true;
    opts.seed = 99;
    const GeneratedCop inst = generate_quad_cop(opts);
    const double sigma = 1.3, rho = 1.7;
    BlockPreconditioner p = inst.precond;
    p.sigma = sigma;
    Wpoint w0 = wp_zeros(inst.cop.dim_y, inst.cop.dim_z, inst.cop.dim_x);
    w0.y[0] = 2.0;
    w0.x[0] = -1.0;
    const std::size_t iters = 1000;
    const History h = run_with_history(inst.cop, w0, sigma, rho, iters);

    IterateState s = make_initial_state(w0);
    ErgodicAccumulator acc = make_accumulator(inst.cop);
    for (std::size_t t = 0; t < iters; ++t) {
      s = padmm_iterate(inst.cop, s, sigma, rho);
      ergodic_accumulate(acc, inst.cop, p, s, sigma);
    }
    const std::size_t k = iters - 1;
    const EpsilonCertificate cert = certificate_epsilon_a(acc, p);
    const double brute = eps_a_bruteforce(h, p, k);
    CHECK(cert.epsilon_raw ==
          doctest::Approx(brute).epsilon(1e-10));
    CHECK(cert.epsilon >= 0.0);
  }
}

TEST_CASE("certificate respects the decay bound from the starting distance") {
  // rho = 1, k = 10, r0^2 = 4: epsilon <= 4 / 22
  const ScalarConsensusCop inst = make_scalar_consensus_cop();
  const Wpoint w0{{1}, {0}, {1}};
  const double r0_sq = m_norm_sq(inst.precond, wp_sub(w0, inst.w_star));
  CHECK(r0_sq == doctest::Approx(4.0));

  IterateState s = make_initial_state(w0);
  ErgodicAccumulator acc = make_accumulator(inst.cop);
  for (int t = 0; t < 11; ++t) {
    s = padmm_iterate(inst.cop, s, 1.0, 1.0);
    ergodic_accumulate(acc, inst.cop, inst.precond, s, 1.0);
  }
  const EpsilonCertificate cert = certificate_epsilon_a(acc, inst.precond);
  CHECK(cert.epsilon >= 0.0);
  CHECK(cert.epsilon <= r0_sq / (2.0 * 1.0 * 11.0) + 1e-12);
}

TEST_CASE("contraction inequality and averaged-gap bounds on random instances") {
  std::mt19937_64 rng(23);
  for (int rep = 0; rep < 8; ++rep) {
    QuadCopOptions opts;
    opts.dim_y = 2 + rng() % 3;
    opts.dim_z = 2 + rng() % 3;
    opts.dim_x = 2 + rng() % 3;
    opts.with_t1 = rep % 2 == 0;
    opts.with_t2 = rep % 3 == 0;
    opts.seed = 1000 + rep;
    const GeneratedCop inst = generate_quad_cop(opts);
    REQUIRE(inst.kkt_residual(inst.w_star) < 1e-12);

    for (double rho : {0.5, 1.0, 1.9, 2.0}) {
      const double sigma = 1.0;
      BlockPreconditioner p = inst.precond;
      p.sigma = sigma;
      Wpoint w0 = wp_zeros(inst.cop.dim_y, inst.cop.dim_z, inst.cop.dim_x);
      w0.y[0] = 1.0;
      const double r0 = m_norm(p, wp_sub(w0, inst.w_star));
      const double scale = 1.0 + r0 * r0;

      IterateState s = make_initial_state(w0);
      ErgodicAccumulator acc = make_accumulator(inst.cop);
      double dist_prev = m_norm_sq(p, wp_sub(s.w, inst.w_star));
      for (std::size_t k = 0; k < 200; ++k) {
        s = padmm_iterate(inst.cop, s, sigma, rho);
        ergodic_accumulate(acc, inst.cop, p, s, sigma);

        // one-step decrease measured in the preconditioner seminorm
        const double dist_next = m_norm_sq(p, wp_sub(s.w, inst.w_star));
        const double gap = m_norm_sq(p, wp_sub(s.w_prev, s.w_bar));
        CHECK(dist_next - dist_prev + rho * (2.0 - rho) * gap <= 1e-9 * scale);
        dist_prev = dist_next;

        // averaged gap decays like 1/k
        const double avg_gap = m_norm(p, wp_sub(acc.wbar_avg(), acc.w_avg()));
        CHECK(avg_gap <= 2.0 * r0 / (rho * (k + 1.0)) + 1e-9);

        const EpsilonCertificate cert = certificate_epsilon_a(acc, p);
        CHECK(cert.epsilon_raw >= -1e-9 * scale);
        CHECK(cert.epsilon <= r0 * r0 / (2.0 * rho * (k + 1.0)) + 1e-9);
      }
    }
  }
}

TEST_CASE("averaged certificate point lies in the enlarged operator graph") {
  QuadCopOptions opts;
  opts.seed = 42;
  opts.with_t1 = true;
  const GeneratedCop inst = generate_quad_cop(opts);
  const double sigma = 1.0, rho = 2.0;
  BlockPreconditioner p = inst.precond;
  p.sigma = sigma;

  Wpoint w0 = wp_zeros(inst.cop.dim_y, inst.cop.dim_z, inst.cop.dim_x);
  w0.x[0] = 1.5;
  IterateState s = make_initial_state(w0);
  ErgodicAccumulator acc = make_accumulator(inst.cop);
  for (int k = 0; k < 50; ++k) {
    s = padmm_iterate(inst.cop, s, sigma, rho);
    ergodic_accumulate(acc, inst.cop, p, s, sigma);
  }
  const EpsilonCertificate cert = certificate_epsilon_a(acc, p);
  const Wpoint wbar_a = acc.wbar_avg();

  // sample graph points (w', Tw') of the smooth saddle operator
  std::mt19937_64 rng(77);
  std::normal_distribution<double> g(0.0, 2.0);
  for (int rep = 0; rep < 1000; ++rep) {
    Wpoint wp = wp_zeros(inst.cop.dim_y, inst.cop.dim_z, inst.cop.dim_x);
    for (auto& v : wp.y) v = g(rng);
    for (auto& v : wp.z) v = g(rng);
    for (auto& v : wp.x) v = g(rng);
    const Wpoint vp = inst.saddle_operator(wp);
    const double inner = wp_dot(wp_sub(wbar_a, wp), wp_sub(cert.v, vp));
    CHECK(inner >= -cert.epsilon - 1e-9);
  }
}

TEST_CASE("averaged half-iterates settle toward the reference point") {
  QuadCopOptions opts;
  opts.seed = 5;
  const GeneratedCop inst = generate_quad_cop(opts);
  const double sigma = 1.0;
  BlockPreconditioner p = inst.precond;
  p.sigma = sigma;

  auto averaged_at = [&](std::size_t iters) {
    IterateState s = make_initial_state(
        wp_zeros(inst.cop.dim_y, inst.cop.dim_z, inst.cop.dim_x));
    ErgodicAccumulator acc = make_accumulator(inst.cop);
    for (std::size_t k = 0; k < iters; ++k) {
      s = padmm_iterate(inst.cop, s, sigma, 2.0);
      ergodic_accumulate(acc, inst.cop, p, s, sigma);
    }
    return acc.wbar_avg();
  };

  double prev_step = kInf;
  for (std::size_t k : {250u, 500u, 1000u, 2000u, 4000u}) {
    const double step = wp_norm2(wp_sub(averaged_at(k), averaged_at(2 * k)));
    CHECK(step < prev_step);
    prev_step = step;
  }
  // the limit is the saddle point itself, whose residual vanishes
  CHECK(inst.kkt_residual(inst.w_star) <= 1e-9);
  CHECK(wp_norm2(wp_sub(averaged_at(4000), inst.w_star)) < 0.01);
}

TEST_CASE("driver loop statuses") {
  const ScalarConsensusCop inst = make_scalar_consensus_cop();
  EngineConfig cfg;
  cfg.sigma = 1.0;

  SUBCASE("zero budget returns the initial state") {
    cfg.rho = 2.0;
    cfg.max_iters = 0;
    const EngineResult r = run(inst.cop, inst.precond, cfg, Wpoint{{1}, {0}, {1}});
    CHECK(r.status == SolveStatus::iteration_limit);
    CHECK(r.total_iters == 0);
    CHECK(r.state.w.y[0] == 1.0);
  }

  SUBCASE("averaged candidate convergence under full relaxation") {
    cfg.rho = 2.0;
    cfg.max_iters = 100000;
    EngineHooks hooks;
    hooks.observe = [&](const EngineContext& ctx) {
      const Wpoint avg = ctx.acc.wbar_avg();
      return wp_norm2(wp_sub(avg, inst.w_star)) <= 1e-9 ? StepAction::stop_optimal
                                                        : StepAction::proceed;
    };
    const EngineResult r =
        run(inst.cop, inst.precond, cfg, Wpoint{{1}, {0}, {1}}, hooks);
    CHECK(r.status == SolveStatus::optimal);
    CHECK(r.acc.wbar_avg().z[0] == 0.0);
    CHECK(std::abs(r.acc.wbar_avg().y[0]) <= 1e-9);
  }

  SUBCASE("point-wise candidate oscillates under full relaxation") {
    cfg.rho = 2.0;
    cfg.max_iters = 2000;
    EngineHooks hooks;
    hooks.observe = [&](const EngineContext& ctx) {
      return wp_norm2(wp_sub(ctx.state.w_bar, inst.w_star)) <= 1e-9
                 ? StepAction::stop_optimal
                 : StepAction::proceed;
    };
    const EngineResult r =
        run(inst.cop, inst.precond, cfg, Wpoint{{1}, {0}, {1}}, hooks);
    CHECK(r.status == SolveStatus::iteration_limit);
    CHECK(std::abs(r.state.w_bar.y[0]) == doctest::Approx(2.0));  // oscillation
  }

  SUBCASE("NaN from a callback surfaces as an error status") {
    CopInstance bad = inst.cop;
    std::size_t calls = 0;
    bad.solve_y = [&calls](const Vec&, const Vec& zbar, const Vec& xbar, double sigma) {
      if (++calls > 3) return Vec{std::nan("")};
      return Vec{-zbar[0] - xbar[0] / sigma};
    };
    cfg.rho = 2.0;
    cfg.max_iters = 100;
    const EngineResult r = run(bad, inst.precond, cfg, Wpoint{{1}, {0}, {1}});
    CHECK(r.status == SolveStatus::error);
    CHECK(r.message.find("iteration") != std::string::npos);
  }
}

TEST_CASE("multiplier update identity holds bit for bit") {
  QuadCopOptions opts;
  opts.seed = 31;
  opts.with_t2 = true;
  const GeneratedCop inst = generate_quad_cop(opts);
  const double sigma = 0.7;
  IterateState s = make_initial_state(
      wp_zeros(inst.cop.dim_y, inst.cop.dim_z, inst.cop.dim_x));
  s.w.y[0] = 1.0;
  for (int k = 0; k < 25; ++k) {
    s = padmm_iterate(inst.cop, s, sigma, 1.8);
    // recompute the update with the same expression shape
    Vec residual = inst.cop.apply_b1(s.w_prev.y);
    add_scaled(residual, 1.0, inst.cop.apply_b2(s.w_bar.z));
    add_scaled(residual, -1.0, inst.cop.c);
    Vec expect = s.w_prev.x;
    add_scaled(expect, sigma, residual);
    CHECK(expect == s.w_bar.x);
  }
}
