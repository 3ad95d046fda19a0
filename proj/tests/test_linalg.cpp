#include <doctest.h>

#include <random>

#include "padmm/linalg.hpp"
#include "test_support.hpp"

using namespace padmm;
using namespace padmm::testing;

TEST_CASE("sparse apply matches hand results") {
  const SparseMatrix eye = SparseMatrix::identity(3);
  CHECK(eye.apply({1, 2, 3}) == Vec{1, 2, 3});

  const SparseMatrix a = SparseMatrix::from_dense({{1, 2}, {3, 4}});
  CHECK(a.apply({0, 0}) == Vec{0, 0});
  CHECK(a.apply({0, 0}, true) == Vec{0, 0});

  // transposed product cross-checked against the dense reference
  const Vec v{1, 1};
  const Vec expect = DenseMatrix::from_sparse(a).apply(v, true);
  const Vec got = a.apply(v, true);
  REQUIRE(got.size() == 2);
  CHECK(got[0] == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(got[1] == doctest::Approx(6.0).epsilon(1e-15));
  CHECK(got[0] == doctest::Approx(expect[0]).epsilon(1e-15));
  CHECK(got[1] == doctest::Approx(expect[1]).epsilon(1e-15));
}

TEST_CASE("sparse apply is linear on random instances") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t m = 3 + rng() % 6, n = 2 + rng() % 7;
    std::vector<Triplet> t;
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (rng() % 3 == 0) t.push_back({i, j, g(rng)});
    const SparseMatrix a = SparseMatrix::from_triplets(m, n, std::move(t));
    Vec u(n), v(n);
    for (auto& x : u) x = g(rng);
    for (auto& x : v) x = g(rng);
    const double alpha = g(rng), beta = g(rng);
    const Vec lhs = a.apply(lincomb(alpha, u, beta, v));
    const Vec rhs = lincomb(alpha, a.apply(u), beta, a.apply(v));
    for (std::size_t i = 0; i < m; ++i)
      CHECK(lhs[i] == doctest::Approx(rhs[i]).epsilon(1e-13));
  }
}

TEST_CASE("sparse construction rejects bad input") {
  CHECK_THROWS_AS(SparseMatrix::from_triplets(2, 2, {{0, 0, 1.0}, {0, 0, 2.0}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(SparseMatrix::from_triplets(2, 2, {{0, 5, 1.0}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(SparseMatrix(1, 1, {0, 2}, {0}, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(SparseMatrix(1, 1, {0, 1}, {0}, {std::nan("")}),
                  std::invalid_argument);
  const SparseMatrix a = SparseMatrix::identity(2);
  CHECK_THROWS_AS(a.apply({1, 2, 3}), std::invalid_argument);
}

TEST_CASE("lambda1 estimate on fixed matrices") {
  Lambda1Options opts;
  const double est_eye = estimate_lambda1(SparseMatrix::identity(3), opts);
  CHECK(est_eye == doctest::Approx(1.0 * (1.0 + opts.safety)).epsilon(1e-9));

  const SparseMatrix diag = SparseMatrix::from_dense({{1, 0}, {0, 2}});
  const double est_diag = estimate_lambda1(diag, opts);
  CHECK(est_diag >= 4.0);
  CHECK(est_diag <= 4.0 * (1.0 + 10.0 * opts.safety));
  CHECK(est_diag == doctest::Approx(4.0 * (1.0 + opts.safety)).epsilon(1e-4));

  const SparseMatrix a = SparseMatrix::from_dense({{1, 2}, {3, 4}});
  const double oracle = max_eigenvalue_aat(a);  // 15 + sqrt(221)
  CHECK(oracle == doctest::Approx(15.0 + std::sqrt(221.0)).epsilon(1e-12));
  const double est = estimate_lambda1(a, opts);
  CHECK(est >= oracle);
  CHECK(est <= oracle * (1.0 + 10.0 * opts.safety));
}

TEST_CASE("lambda1 estimate dominates the dense oracle on random matrices") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t m = 2 + rng() % 7, n = 2 + rng() % 7;
    std::vector<Triplet> t;
    bool nonzero = false;
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (rng() % 2 == 0) {
          t.push_back({i, j, g(rng)});
          nonzero = true;
        }
    if (!nonzero) t.push_back({0, 0, 1.0});
    const SparseMatrix a = SparseMatrix::from_triplets(m, n, std::move(t));
    Lambda1Options opts;
    opts.seed = rep;
    const double est = estimate_lambda1(a, opts);
    CHECK(est >= max_eigenvalue_aat(a) * (1.0 - 1e-12));
  }
}

TEST_CASE("lambda1 estimate rejects the zero operator") {
  CHECK_THROWS_AS(estimate_lambda1(SparseMatrix::from_triplets(2, 2, {})),
                  std::invalid_argument);
  CHECK_THROWS_AS(estimate_lambda1(SparseMatrix::from_triplets(2, 2, {{0, 0, 0.0}})),
                  std::invalid_argument);
}

TEST_CASE("box projection") {
  CHECK(project_box({0.5}, {0.0}, {1.0}) == Vec{0.5});
  CHECK(project_box({2, 3}, {0, -kInf}, {1, 2}) == Vec{1, 2});
  CHECK(project_box({-7}, {5}, {5}) == Vec{5});
  CHECK_THROWS_AS(project_box({0}, {1}, {0}), std::invalid_argument);

  std::mt19937_64 rng(3);
  std::normal_distribution<double> g(0.0, 2.0);
  Vec l{-1, 0, -kInf, 2}, u{1, 0, 5, kInf};
  for (int rep = 0; rep < 200; ++rep) {
    Vec a(4), b(4);
    for (auto& v : a) v = g(rng);
    for (auto& v : b) v = g(rng);
    const Vec pa = project_box(a, l, u), pb = project_box(b, l, u);
    CHECK(project_box(pa, l, u) == pa);                     // idempotent
    CHECK(norm2(sub(pa, pb)) <= norm2(sub(a, b)) + 1e-14);  // nonexpansive
  }
}

TEST_CASE("cone projection") {
  CHECK(project_cone_d({-1, -2}, 2) == Vec{-1, -2});
  CHECK(project_cone_d({-1, -1}, 1) == Vec{-1, 0});
  CHECK(project_cone_d({0, 0}, 0) == Vec{0, 0});
  CHECK_THROWS_AS(project_cone_d({0}, 2), std::invalid_argument);

  std::mt19937_64 rng(5);
  std::normal_distribution<double> g(0.0, 2.0);
  for (int rep = 0; rep < 200; ++rep) {
    Vec a(5), b(5);
    for (auto& v : a) v = g(rng);
    for (auto& v : b) v = g(rng);
    const Vec pa = project_cone_d(a, 2), pb = project_cone_d(b, 2);
    CHECK(project_cone_d(pa, 2) == pa);
    CHECK(norm2(sub(pa, pb)) <= norm2(sub(a, b)) + 1e-14);
  }
}

namespace {

BlockPreconditioner spectral_precond(const SparseMatrix& a, double sigma,
                                     double lambda1) {
  BlockPreconditioner p;
  p.sigma = sigma;
  p.lambda1 = lambda1;
  p.t1_kind = BlockPreconditioner::T1Kind::lp_spectral;
  p.t2_kind = BlockPreconditioner::T2Kind::zero;
  p.apply_b1 = [a](const Vec& y) { return a.apply(y, true); };
  p.apply_b1_adj = [a](const Vec& u) { return a.apply(u, false); };
  return p;
}

}  // namespace

TEST_CASE("seminorm block evaluation") {
  // scalar coupling with unit penalty: <w,Mw> = (y+x)^2
  BlockPreconditioner p;
  p.sigma = 1.0;
  p.t1_kind = BlockPreconditioner::T1Kind::explicit_op;
  p.t2_kind = BlockPreconditioner::T2Kind::zero;
  auto id = [](const Vec& v) { return v; };
  p.apply_b1 = id;
  p.apply_b1_adj = id;
  CHECK(m_norm_sq(p, Wpoint{{0}, {0}, {0}}) == 0.0);
  CHECK(m_norm_sq(p, Wpoint{{1}, {0}, {1}}) == doctest::Approx(4.0));

  const SparseMatrix eye2 = SparseMatrix::identity(2);
  BlockPreconditioner ps = spectral_precond(eye2, 1.0, 1.0);  // exact, no safety
  const Wpoint w{{1, 0}, {}, {0, 1}};
  CHECK(m_norm_sq(ps, w) == doctest::Approx(2.0));
}

TEST_CASE("seminorm agrees with dense assembly and stays nonnegative") {
  std::mt19937_64 rng(13);
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.5, 2.0);
  for (int rep = 0; rep < 1000; ++rep) {
    const std::size_t m = 1 + rng() % 5, n = 1 + rng() % 5;
    std::vector<Triplet> t;
    bool nonzero = false;
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (rng() % 2 == 0) {
          t.push_back({i, j, g(rng)});
          nonzero = true;
        }
    if (!nonzero) t.push_back({0, 0, 1.0});
    const SparseMatrix a = SparseMatrix::from_triplets(m, n, std::move(t));
    Lambda1Options lopts;
    lopts.seed = rep;
    const double sigma = unif(rng);
    const BlockPreconditioner p =
        spectral_precond(a, sigma, estimate_lambda1(a, lopts));

    Wpoint w{Vec(m), Vec(0), Vec(n)};
    for (auto& v : w.y) v = g(rng);
    for (auto& v : w.x) v = g(rng);

    const double raw = m_norm_sq_raw(p, w);
    CHECK(raw >= -1e-10 * (1.0 + std::abs(raw)));  // PSD under the over-estimate
    CHECK(m_norm_sq(p, w) >= 0.0);

    if (rep < 100) {
      // dense route: y block sigma*lambda1*I, coupling A, corner I/sigma
      const DenseMatrix ad = DenseMatrix::from_sparse(a);
      const std::size_t dim = m + n;
      DenseMatrix md(dim, dim);
      for (std::size_t i = 0; i < m; ++i) md.at(i, i) = sigma * p.lambda1;
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) {
          md.at(i, m + j) = ad.at(i, j);
          md.at(m + j, i) = ad.at(i, j);
        }
      for (std::size_t j = 0; j < n; ++j) md.at(m + j, m + j) = 1.0 / sigma;
      Vec flat = w.y;
      flat.insert(flat.end(), w.x.begin(), w.x.end());
      const double dense_val = dot(flat, md.apply(flat));
      CHECK(raw == doctest::Approx(dense_val).epsilon(1e-12));
    }
  }
}

TEST_CASE("seminorm explicit blocks agree with dense assembly") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t dy = 1 + rng() % 4, dz = 1 + rng() % 4, dx = 1 + rng() % 4;
    DenseMatrix b1(dx, dy);
    for (auto& v : b1.a) v = g(rng);
    Vec t1(dy), t2(dz);
    for (auto& v : t1) v = std::abs(g(rng));
    for (auto& v : t2) v = std::abs(g(rng));
    const double sigma = 0.5 + (rng() % 100) / 50.0;

    BlockPreconditioner p;
    p.sigma = sigma;
    p.t1_kind = BlockPreconditioner::T1Kind::explicit_op;
    p.t2_kind = BlockPreconditioner::T2Kind::explicit_op;
    p.apply_b1 = [b1](const Vec& y) { return b1.apply(y); };
    p.apply_b1_adj = [b1](const Vec& u) { return b1.apply(u, true); };
    p.apply_t1 = [t1](const Vec& v) {
      Vec r(v.size());
      for (std::size_t i = 0; i < v.size(); ++i) r[i] = t1[i] * v[i];
      return r;
    };
    p.apply_t2 = [t2](const Vec& v) {
      Vec r(v.size());
      for (std::size_t i = 0; i < v.size(); ++i) r[i] = t2[i] * v[i];
      return r;
    };

    Wpoint w{Vec(dy), Vec(dz), Vec(dx)};
    for (auto& v : w.y) v = g(rng);
    for (auto& v : w.z) v = g(rng);
    for (auto& v : w.x) v = g(rng);

    const DenseMatrix md = assemble_m_dense(b1, t1, t2, sigma, dz);
    const Vec flat = flatten(w);
    const double dense_val = dot(flat, md.apply(flat));
    CHECK(m_norm_sq_raw(p, w) == doctest::Approx(dense_val).epsilon(1e-12));

    // apply_m agrees with the dense matrix product
    const Vec mw_dense = md.apply(flat);
    const Vec mw = flatten(apply_m(p, w));
    for (std::size_t i = 0; i < mw.size(); ++i)
      CHECK(mw[i] == doctest::Approx(mw_dense[i]).epsilon(1e-12));
  }
}
