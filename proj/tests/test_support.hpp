#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "padmm/dense.hpp"
#include "padmm/linalg.hpp"
#include "padmm/splitting.hpp"

namespace padmm::testing {

// Cyclic Jacobi eigensolver for small symmetric matrices; the independent
// route for spectral checks.
inline Vec jacobi_eigenvalues(DenseMatrix a) {
  const std::size_t n = a.rows;
  for (std::size_t sweep = 0; sweep < 200; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) off += a.at(i, j) * a.at(i, j);
    if (off < 1e-26) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a.at(p, q);
        if (std::abs(apq) < 1e-300) continue;
        const double theta = (a.at(q, q) - a.at(p, p)) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a.at(k, p), akq = a.at(k, q);
          a.at(k, p) = c * akp - s * akq;
          a.at(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a.at(p, k), aqk = a.at(q, k);
          a.at(p, k) = c * apk - s * aqk;
          a.at(q, k) = s * apk + c * aqk;
        }
      }
    }
  }
  Vec eig(n);
  for (std::size_t i = 0; i < n; ++i) eig[i] = a.at(i, i);
  return eig;
}

inline double max_eigenvalue_aat(const SparseMatrix& a) {
  const DenseMatrix ad = DenseMatrix::from_sparse(a);
  DenseMatrix aat(a.rows(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.rows(); ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < a.cols(); ++k) s += ad.at(i, k) * ad.at(j, k);
      aat.at(i, j) = s;
    }
  const Vec eig = jacobi_eigenvalues(aat);
  double best = 0.0;
  for (double v : eig) best = std::max(best, v);
  return best;
}

// Iterate history for brute-force certificate oracles.
struct History {
  std::vector<Wpoint> w;     // w^0 .. w^{k+1}
  std::vector<Wpoint> wbar;  // wbar^0 .. wbar^k
};

inline History run_with_history(const CopInstance& problem, Wpoint w0, double sigma,
                                double rho, std::size_t iters) {
  History h;
  IterateState state = make_initial_state(std::move(w0));
  h.w.push_back(state.w);
  for (std::size_t t = 0; t < iters; ++t) {
    state = padmm_iterate(problem, state, sigma, rho);
    h.wbar.push_back(state.w_bar);
    h.w.push_back(state.w);
  }
  return h;
}

inline Wpoint average(const std::vector<Wpoint>& pts, std::size_t count) {
  Wpoint s = wp_zeros(pts[0].y.size(), pts[0].z.size(), pts[0].x.size());
  for (std::size_t t = 0; t < count; ++t) wp_add_scaled(s, 1.0, pts[t]);
  return wp_scaled(s, 1.0 / static_cast<double>(count));
}

// epsilon of the averaged half-iterate by direct summation of its definition
inline double eps_a_bruteforce(const History& h, const BlockPreconditioner& p,
                               std::size_t k) {
  const Wpoint wbar_a = average(h.wbar, k + 1);
  double total = 0.0;
  for (std::size_t t = 0; t <= k; ++t) {
    const Wpoint md = apply_m(p, wp_sub(h.w[t], h.wbar[t]));
    total += wp_dot(wp_sub(h.wbar[t], wbar_a), md);
  }
  return total / static_cast<double>(k + 1);
}

// literal z-block slack: mean of <g_z^t, zbar^t - zbar_a> with
// g_z^t = -B2* xbar^t - T2(zbar^t - z^t)
inline double eps_z_bruteforce(const History& h, const CopInstance& problem,
                               std::size_t k) {
  const Wpoint wbar_a = average(h.wbar, k + 1);
  double total = 0.0;
  for (std::size_t t = 0; t <= k; ++t) {
    Vec g = problem.apply_b2_adj(h.wbar[t].x);
    scale(g, -1.0);
    add_scaled(g, -1.0, problem.t2_or_zero(sub(h.wbar[t].z, h.w[t].z)));
    total += dot(g, sub(h.wbar[t].z, wbar_a.z));
  }
  return total / static_cast<double>(k + 1);
}

// literal y-block slack with
// g_y^t = -B1*(xbar^t + sigma(B1 ybar^t + B2 zbar^t - c)) - T1(ybar^t - y^t)
inline double eps_y_bruteforce(const History& h, const CopInstance& problem,
                               double sigma, std::size_t k) {
  const Wpoint wbar_a = average(h.wbar, k + 1);
  double total = 0.0;
  for (std::size_t t = 0; t <= k; ++t) {
    Vec inner = problem.apply_b1(h.wbar[t].y);
    add_scaled(inner, 1.0, problem.apply_b2(h.wbar[t].z));
    add_scaled(inner, -1.0, problem.c);
    scale(inner, sigma);
    add_scaled(inner, 1.0, h.wbar[t].x);
    Vec g = problem.apply_b1_adj(inner);
    scale(g, -1.0);
    add_scaled(g, -1.0, problem.t1_or_zero(sub(h.wbar[t].y, h.w[t].y)));
    total += dot(g, sub(h.wbar[t].y, wbar_a.y));
  }
  return total / static_cast<double>(k + 1);
}

inline Vec literal_gy(const History& h, const CopInstance& problem, double sigma,
                      std::size_t t) {
  Vec inner = problem.apply_b1(h.wbar[t].y);
  add_scaled(inner, 1.0, problem.apply_b2(h.wbar[t].z));
  add_scaled(inner, -1.0, problem.c);
  scale(inner, sigma);
  add_scaled(inner, 1.0, h.wbar[t].x);
  Vec g = problem.apply_b1_adj(inner);
  scale(g, -1.0);
  add_scaled(g, -1.0, problem.t1_or_zero(sub(h.wbar[t].y, h.w[t].y)));
  return g;
}

// dense preconditioner matrix assembled from the raw block data, independent
// of apply_m
inline DenseMatrix assemble_m_dense(const DenseMatrix& b1, const Vec& t1_diag,
                                    const Vec& t2_diag, double sigma,
                                    std::size_t dim_z) {
  const std::size_t dy = b1.cols, dx = b1.rows, dim = dy + dim_z + dx;
  DenseMatrix m(dim, dim);
  for (std::size_t i = 0; i < dy; ++i)
    for (std::size_t j = 0; j < dy; ++j) {
      double btb = 0.0;
      for (std::size_t r = 0; r < dx; ++r) btb += b1.at(r, i) * b1.at(r, j);
      m.at(i, j) = sigma * btb + (i == j && !t1_diag.empty() ? t1_diag[i] : 0.0);
    }
  for (std::size_t i = 0; i < dim_z; ++i)
    m.at(dy + i, dy + i) = t2_diag.empty() ? 0.0 : t2_diag[i];
  for (std::size_t r = 0; r < dx; ++r)
    for (std::size_t j = 0; j < dy; ++j) {
      m.at(dy + dim_z + r, j) = b1.at(r, j);
      m.at(j, dy + dim_z + r) = b1.at(r, j);
    }
  for (std::size_t r = 0; r < dx; ++r)
    m.at(dy + dim_z + r, dy + dim_z + r) = 1.0 / sigma;
  return m;
}

inline Vec flatten(const Wpoint& w) {
  Vec v;
  v.insert(v.end(), w.y.begin(), w.y.end());
  v.insert(v.end(), w.z.begin(), w.z.end());
  v.insert(v.end(), w.x.begin(), w.x.end());
  return v;
}

}  // namespace padmm::testing
