#pragma once

// Slow, independent reference computations. Used by the test suite and `graphtopo verify`;
// not meant for production paths.

#include "core.hpp"
#include "physical.hpp"
#include "portfolio.hpp"
#include "random.hpp"
#include "sparse.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

namespace graphtopo::oracle {

// Minimum cut value over all 2^{N-1} - 1 bipartitions.
inline double brute_force_min_cut(const Graph& g, CutKind kind, Bipartition* arg = nullptr) {
  const Index n = g.n();
  detail::require(n >= 2 && n <= 24, "brute_force_min_cut: N must be in [2, 24]");
  double best = std::numeric_limits<double>::infinity();
  const unsigned long long lim = 1ull << (n - 1);
  for (unsigned long long mask = 1; mask < lim; ++mask) {
    Bipartition p;
    for (Index i = 0; i < n; ++i) ((mask >> i) & 1ull ? p.first : p.second).push_back(i);
    if (kind == CutKind::volume) {
      // skip zero-volume sides
      double v1 = 0.0, v2 = 0.0;
      const Vector d = g.degrees();
      for (Index i : p.first) v1 += d(i);
      for (Index i : p.second) v2 += d(i);
      if (v1 == 0.0 || v2 == 0.0) continue;
    }
    const double v = cut_value(g, p, kind);
    if (v < best) {
      best = v;
      if (arg) *arg = p;
    }
  }
  return best;
}

// All-pairs hop distances (Floyd-Warshall), +inf when unreachable.
inline Matrix floyd_warshall_hops(const Matrix& w) {
  const Index n = w.rows();
  const double inf = std::numeric_limits<double>::infinity();
  Matrix d = Matrix::Constant(n, n, inf);
  for (Index i = 0; i < n; ++i) {
    d(i, i) = 0.0;
    for (Index j = 0; j < n; ++j)
      if (i != j && w(i, j) > 0.0) d(i, j) = 1.0;
  }
  for (Index k = 0; k < n; ++k)
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j)
        if (d(i, k) + d(k, j) < d(i, j)) d(i, j) = d(i, k) + d(k, j);
  return d;
}

struct MonteCarloEstimate {
  double mean = 0.0;
  double stderr_ = 0.0;
};

// Random walk with transition probabilities W_mn / d_m, counted until `target` is hit.
inline MonteCarloEstimate mc_hitting_time(const Graph& g, Index start, Index target, long walks, std::uint64_t seed) {
  const Index n = g.n();
  std::vector<std::vector<std::pair<double, Index>>> cum(n);
  for (Index i = 0; i < n; ++i) {
    double acc = 0.0;
    const double d = g.degrees()(i);
    for (Index j = 0; j < n; ++j)
      if (g.w()(i, j) > 0.0) {
        acc += g.w()(i, j) / d;
        cum[i].push_back({acc, j});
      }
    if (!cum[i].empty()) cum[i].back().first = 1.0;
  }
  Rng rng = Rng::substream(seed, static_cast<std::uint64_t>(start));
  double s = 0.0, s2 = 0.0;
  for (long w = 0; w < walks; ++w) {
    Index v = start;
    long steps = 0;
    while (v != target) {
      const double u = rng.uniform();
      const auto& c = cum[v];
      size_t k = 0;
      while (c[k].first <= u) ++k;
      v = c[k].second;
      ++steps;
    }
    s += static_cast<double>(steps);
    s2 += static_cast<double>(steps) * static_cast<double>(steps);
  }
  const double m = s / static_cast<double>(walks);
  const double var = (s2 / static_cast<double>(walks) - m * m) * static_cast<double>(walks) / static_cast<double>(walks - 1);
  return {m, std::sqrt(var / static_cast<double>(walks))};
}

// Friedman-style graphical lasso with coordinate-descent inner solves of
// min 1/2 b^T W11 b - b^T s12 + rho ||b||_1.
inline Matrix cd_glasso(const Matrix& s, double rho, int sweeps = 500, double tol = 1e-12) {
  const Index n = s.rows();
  Matrix w = s;
  w.diagonal().array() += rho;
  Matrix beta = Matrix::Zero(n - 1, n);
  for (int it = 0; it < sweeps; ++it) {
    const Matrix w_old = w;
    for (Index j = 0; j < n; ++j) {
      std::vector<Index> idx;
      for (Index i = 0; i < n; ++i)
        if (i != j) idx.push_back(i);
      const Matrix w11 = take(w, idx, idx);
      Vector s12(n - 1);
      for (Index i = 0; i < n - 1; ++i) s12(i) = s(idx[i], j);
      Vector b = beta.col(j);
      for (int cd = 0; cd < 10000; ++cd) {
        double change = 0.0;
        for (Index k = 0; k < n - 1; ++k) {
          const double r = s12(k) - (w11.row(k).dot(b) - w11(k, k) * b(k));
          const double nb = soft_threshold(r, rho) / w11(k, k);
          change = std::max(change, std::abs(nb - b(k)));
          b(k) = nb;
        }
        if (change < tol) break;
      }
      beta.col(j) = b;
      const Vector w12 = w11 * b;
      for (Index i = 0; i < n - 1; ++i) w(idx[i], j) = w(j, idx[i]) = w12(i);
    }
    if ((w - w_old).cwiseAbs().maxCoeff() < tol) break;
  }
  return w.inverse();
}

// Exhaustive minimisation of ||y - A x||^2 + rho ||x||_1 over a grid, refined around the best point.
inline Vector grid_lasso(const Matrix& a, const Vector& y, double rho, double lo, double hi, int points, int refinements) {
  const Index n = a.cols();
  Vector best = Vector::Zero(n);
  double best_f = std::numeric_limits<double>::infinity();
  Vector center = Vector::Constant(n, 0.5 * (lo + hi));
  double half = 0.5 * (hi - lo);
  for (int r = 0; r <= refinements; ++r) {
    std::vector<int> idx(n, 0);
    const double h = 2.0 * half / (points - 1);
    while (true) {
      Vector x(n);
      for (Index i = 0; i < n; ++i) x(i) = center(i) - half + h * idx[i];
      const double f = (y - a * x).squaredNorm() + rho * x.lpNorm<1>();
      if (f < best_f) {
        best_f = f;
        best = x;
      }
      Index k = 0;
      while (k < n && ++idx[k] == points) idx[k++] = 0;
      if (k == n) break;
    }
    center = best;
    half = 2.0 * h;
  }
  return best;
}

// Adaptive Simpson quadrature.
inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double eps, int depth = 50) {
  auto simpson = [&](double l, double r, double fl, double fm, double fr) { return (r - l) / 6.0 * (fl + 4.0 * fm + fr); };
  std::function<double(double, double, double, double, double, double, double, int)> rec =
      [&](double l, double r, double fl, double fm, double fr, double whole, double e, int d) {
        const double m = 0.5 * (l + r), lm = 0.5 * (l + m), rm = 0.5 * (m + r);
        const double flm = f(lm), frm = f(rm);
        const double left = simpson(l, m, fl, flm, fm), right = simpson(m, r, fm, frm, fr);
        if (d <= 0 || std::abs(left + right - whole) <= 15.0 * e) return left + right + (left + right - whole) / 15.0;
        return rec(l, m, fl, flm, fm, left, e / 2.0, d - 1) + rec(m, r, fm, frm, fr, right, e / 2.0, d - 1);
      };
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  return rec(a, b, fa, fm, fb, simpson(a, b, fa, fm, fb), eps, depth);
}

}  // namespace graphtopo::oracle
