#pragma once

#include "core.hpp"
#include "parallel.hpp"
#include "sparse.hpp"

#include <cmath>
#include <numeric>
#include <optional>
#include <vector>

namespace graphtopo {

// (1/P) X X^T, optionally with per-vertex means removed first.
inline Matrix correlation_matrix(const Matrix& x, bool center = false) {
  detail::require(x.cols() >= 1, "correlation_matrix: need at least one observation");
  const double p = static_cast<double>(x.cols());
  if (!center) return (x * x.transpose()) / p;
  const Matrix xc = x.colwise() - x.rowwise().mean();
  return (xc * xc.transpose()) / p;
}

struct RegressionConfig {
  double rho = 0.0;
  int max_iter = 20000;
  double tol = 1e-10;
};

struct RegressionResult {
  Matrix beta;  // zero diagonal
  std::vector<bool> converged;
  std::vector<int> iterations;
};

// Row n: lasso of y_n on the remaining rows of X.
inline RegressionResult neighborhood_regression(const Matrix& x, const RegressionConfig& cfg) {
  const Index n = x.rows();
  RegressionResult out;
  out.beta = Matrix::Zero(n, n);
  out.converged.assign(n, true);
  out.iterations.assign(n, 0);
  if (n <= 1) return out;
  detail::require(x.cols() >= 2, "neighborhood_regression: need P >= 2 observations");
  LassoConfig lc;
  lc.rho = cfg.rho;
  lc.max_iter = cfg.max_iter;
  lc.tol = cfg.tol;
  std::vector<Vector> rows(n);
  std::vector<char> ok(n, 1);
  std::vector<int> iters(n, 0);
  // Gram form: per-row design is X without row k, so all blocks come from X X^T
  const Matrix g = x * x.transpose();
  parallel_for(static_cast<size_t>(n), [&](size_t k) {
    std::vector<Index> idx;
    for (Index i = 0; i < n; ++i)
      if (i != static_cast<Index>(k)) idx.push_back(i);
    const Matrix gk = take(g, idx, idx);
    Vector ck(n - 1);
    for (Index i = 0; i < n - 1; ++i) ck(i) = g(idx[i], k);
    try {
      LassoResult r = lasso_gram(gk, ck, lc);
      rows[k] = std::move(r.x);
      ok[k] = r.converged;
      iters[k] = r.iterations;
    } catch (const InvalidArgument& e) {
      throw InvalidArgument("neighborhood_regression row " + std::to_string(k) + ": " + e.what());
    }
  });
  for (Index k = 0; k < n; ++k) {
    Index c = 0;
    for (Index i = 0; i < n; ++i)
      if (i != k) out.beta(k, i) = rows[k](c++);
    out.converged[k] = ok[k];
    out.iterations[k] = iters[k];
  }
  return out;
}

// W_nm = sqrt(beta_nm beta_mn); pairs with a negative member are an error unless clamped to 0.
inline Graph symmetrize_geometric(const Matrix& b, bool clamp_negative = false) {
  detail::require(b.rows() == b.cols(), "symmetrize_geometric: matrix must be square");
  const Index n = b.rows();
  Matrix w = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) {
      const double a = b(i, j), c = b(j, i);
      if (a < 0.0 || c < 0.0) {
        if (!clamp_negative)
          throw InvalidArgument("symmetrize_geometric: negative coefficient at pair (" + std::to_string(i) + "," +
                                std::to_string(j) + ")");
        continue;
      }
      w(i, j) = w(j, i) = std::sqrt(a * c);
    }
  return Graph(std::move(w));
}

// Y minimising 1/2 ||Y - X||^2 + alpha Tr(Y^T L Y).
inline Matrix smooth_y_step(const Matrix& l, const Matrix& x, double alpha) {
  detail::require(alpha >= 0.0, "smooth_y_step: alpha must be >= 0");
  if (alpha == 0.0) return x;
  Matrix a = 2.0 * alpha * l;
  a.diagonal().array() += 1.0;
  return a.ldlt().solve(x);
}

struct SmoothLearnConfig {
  double alpha = 1.0;
  double beta = 1.0;
  int outer_iters = 10;
  int inner_iters = 2000;
  double inner_tol = 1e-10;
};

struct SmoothLearnResult {
  Laplacian l;
  Matrix y;
  std::vector<double> objective;  // initial, then after every L-step and Y-step
};

namespace detail {

// Euclidean projection onto {w >= 0, sum w = s}.
inline Vector project_simplex(const Vector& v, double s) {
  std::vector<double> u(v.data(), v.data() + v.size());
  std::sort(u.begin(), u.end(), std::greater<double>());
  double cum = 0.0, theta = 0.0;
  for (size_t k = 0; k < u.size(); ++k) {
    cum += u[k];
    const double t = (cum - s) / static_cast<double>(k + 1);
    if (k + 1 == u.size() || u[k + 1] <= t) {
      theta = t;
      break;
    }
  }
  return (v.array() - theta).cwiseMax(0.0);
}

inline Matrix laplacian_from_pairs(Index n, const Vector& w) {
  Matrix l = Matrix::Zero(n, n);
  Index c = 0;
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j, ++c) {
      l(i, j) = l(j, i) = -w(c);
      l(i, i) += w(c);
      l(j, j) += w(c);
    }
  return l;
}

}  // namespace detail

inline double smooth_objective(const Matrix& x, const Matrix& y, const Matrix& l, double alpha, double beta) {
  return 0.5 * (y - x).squaredNorm() + alpha * (y.transpose() * l * y).trace() + beta * l.squaredNorm();
}

// Alternating minimisation of 1/2||Y-X||^2 + alpha Tr(Y^T L Y) + beta ||L||_F^2 over Laplacians with
// Tr L = N, off-diagonals <= 0, zero row sums. The L-step works on edge weights w >= 0, sum w = N/2.
inline SmoothLearnResult smooth_learn(const Matrix& x, const SmoothLearnConfig& cfg) {
  detail::require(cfg.alpha > 0.0 && cfg.beta > 0.0, "smooth_learn: alpha and beta must be > 0");
  detail::require(cfg.outer_iters >= 1, "smooth_learn: outer_iters must be >= 1");
  const Index n = x.rows();
  detail::require(n >= 2, "smooth_learn: need at least 2 vertices");
  const Index pairs = n * (n - 1) / 2;
  const double total = static_cast<double>(n) / 2.0;
  Vector w = Vector::Constant(pairs, total / static_cast<double>(pairs));
  SmoothLearnResult out;
  out.y = x;
  Matrix l = detail::laplacian_from_pairs(n, w);
  out.objective.push_back(smooth_objective(x, out.y, l, cfg.alpha, cfg.beta));
  const double step = 1.0 / (4.0 * cfg.beta * static_cast<double>(n));
  for (int it = 0; it < cfg.outer_iters; ++it) {
    // pairwise squared distances between rows of Y
    Vector z(pairs);
    {
      Index c = 0;
      for (Index i = 0; i < n; ++i)
        for (Index j = i + 1; j < n; ++j, ++c) z(c) = (out.y.row(i) - out.y.row(j)).squaredNorm();
    }
    for (int k = 0; k < cfg.inner_iters; ++k) {
      const Vector d = l.diagonal();
      Vector grad(pairs);
      Index c = 0;
      for (Index i = 0; i < n; ++i)
        for (Index j = i + 1; j < n; ++j, ++c)
          grad(c) = cfg.alpha * z(c) + cfg.beta * (2.0 * d(i) + 2.0 * d(j) + 4.0 * w(c));
      Vector next = detail::project_simplex(w - step * grad, total);
      const double change = (next - w).norm() / std::max(w.norm(), 1e-12);
      w.swap(next);
      l = detail::laplacian_from_pairs(n, w);
      if (change < cfg.inner_tol) break;
    }
    out.objective.push_back(smooth_objective(x, out.y, l, cfg.alpha, cfg.beta));
    out.y = smooth_y_step(l, x, cfg.alpha);
    out.objective.push_back(smooth_objective(x, out.y, l, cfg.alpha, cfg.beta));
  }
  out.l = Laplacian{std::move(l), LaplacianKind::combinatorial};
  return out;
}

struct SpectralFullConfig {
  int iterations = 20000;
  double step = 0.3;
};

struct SpectralFullResult {
  Laplacian l;
  Vector eigenvalues;  // lambda assigned to each eigenvector of R (R's ascending order)
  double objective = 0.0;
  bool lowpass = true;  // constant eigenvector sits at R's top
};

namespace detail {

// Projection onto {d >= 0, c^T d = s} with c > 0.
inline Vector project_weighted_simplex(const Vector& v, const Vector& c, double s) {
  const Index m = v.size();
  std::vector<Index> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](Index a, Index b) { return v(a) / c(a) > v(b) / c(b); });
  double cv = 0.0, cc = 0.0, theta = 0.0;
  for (Index k = 0; k < m; ++k) {
    const Index j = order[k];
    cv += c(j) * v(j);
    cc += c(j) * c(j);
    theta = (cv - s) / cc;
    if (k + 1 == m || v(order[k + 1]) / c(order[k + 1]) <= theta) break;
  }
  Vector out(m);
  for (Index j = 0; j < m; ++j) out(j) = std::max(v(j) - theta * c(j), 0.0);
  return out;
}

}  // namespace detail

// Sparsest Laplacian sharing R's eigenvectors: minimise ||L||_1 / ||L||_F over lambda_0 = 0,
// lambda >= 0, sum lambda = N, with lambda monotone in R's eigenvalue order.
inline SpectralFullResult spectral_topology_full(const Matrix& r, const SpectralFullConfig& cfg = {}) {
  const Index n = r.rows();
  detail::require(r.rows() == r.cols(), "spectral_topology_full: R must be square");
  detail::require(n >= 1 && n <= 30, "spectral_topology_full: N must be in [1, 30]");
  const SpectralDecomp e = eig_sym(r);
  SpectralFullResult out;
  if (n == 1) {
    out.l = Laplacian{Matrix::Zero(1, 1), LaplacianKind::normalized};
    out.eigenvalues = Vector::Zero(1);
    return out;
  }
  const Vector ones = Vector::Ones(n) / std::sqrt(static_cast<double>(n));
  Index k0 = 0;
  double best_align = -1.0;
  for (Index k = 0; k < n; ++k) {
    const double a = std::abs(e.vectors.col(k).dot(ones));
    if (a > best_align + 1e-12) {
      best_align = a;
      k0 = k;
    }
  }
  out.lowpass = 2 * k0 >= n - 1;
  // order[0] = constant eigenvector, then the rest by increasing lambda
  std::vector<Index> order{k0};
  if (out.lowpass) {
    for (Index k = n - 1; k >= 0; --k)
      if (k != k0) order.push_back(k);
  } else {
    for (Index k = 0; k < n; ++k)
      if (k != k0) order.push_back(k);
  }
  Matrix u(n, n);
  for (Index k = 0; k < n; ++k) u.col(k) = e.vectors.col(order[k]);
  // lambda_k = sum_{j<=k} d_j (k >= 1); sum lambda = sum_j (n - j) d_j
  Vector c(n - 1);
  for (Index j = 1; j < n; ++j) c(j - 1) = static_cast<double>(n - j);
  const double target = static_cast<double>(n);
  auto lambdas = [&](const Vector& d) {
    Vector l = Vector::Zero(n);
    for (Index k = 1; k < n; ++k) l(k) = l(k - 1) + d(k - 1);
    return l;
  };
  Vector d = detail::project_weighted_simplex(Vector::Ones(n - 1), c, target);
  Vector best_l = lambdas(d);
  double best = std::numeric_limits<double>::infinity();
  const int iters = n == 2 ? 1 : cfg.iterations;
  for (int t = 1; t <= iters; ++t) {
    const Vector lam = lambdas(d);
    const Matrix lm = u * lam.asDiagonal() * u.transpose();
    const double l1 = lm.lpNorm<1>();
    const double fro = lm.norm();
    const double f = l1 / fro;
    if (f < best) {
      best = f;
      best_l = lam;
    }
    const Matrix sgn = lm.unaryExpr([](double v) { return v > 0 ? 1.0 : (v < 0 ? -1.0 : 0.0); });
    Vector g(n);
    for (Index k = 0; k < n; ++k) {
      const Vector uk = u.col(k);
      g(k) = uk.dot(sgn * uk) / fro - l1 / (fro * fro * fro) * lam(k);
    }
    Vector gd(n - 1);
    double acc = 0.0;
    for (Index j = n - 1; j >= 1; --j) {
      acc += g(j);
      gd(j - 1) = acc;
    }
    const double gn = gd.norm();
    if (gn < 1e-14) break;
    d = detail::project_weighted_simplex(d - cfg.step / std::sqrt(static_cast<double>(t)) * gd / gn, c, target);
  }
  out.objective = best;
  out.l = Laplacian{u * best_l.asDiagonal() * u.transpose(), LaplacianKind::normalized};
  out.eigenvalues = Vector::Zero(n);
  for (Index k = 0; k < n; ++k) out.eigenvalues(order[k]) = best_l(k);
  return out;
}

struct PolyFitConfig {
  int m = 2;
  int grid_points = 0;  // 0: 50 for M = 2, 25 for M >= 3
  double bisect_tol = 1e-10;
};

struct PolyFitResult {
  Vector eigenvalues;  // lambda-hat per eigenvector, ascending H order
  Laplacian l;
  std::vector<double> xi;
  double objective = 0.0;
  std::vector<Index> knots;
  // every evaluated candidate: xi tuple + sparsity measure (plot data)
  std::vector<std::pair<std::vector<double>, double>> curve;
};

namespace detail {

inline double lagrange_eval(const std::vector<double>& xs, const std::vector<double>& ys, double t) {
  double s = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) {
    double b = 1.0;
    for (size_t j = 0; j < xs.size(); ++j)
      if (j != i) b *= (t - xs[j]) / (xs[i] - xs[j]);
    s += ys[i] * b;
  }
  return s;
}

inline void next_combination(std::vector<int>& c, int g, bool& done) {
  // strictly increasing tuples from {1..g}, lexicographic
  const int k = static_cast<int>(c.size());
  int i = k - 1;
  while (i >= 0 && c[i] == g - (k - 1 - i)) --i;
  if (i < 0) {
    done = true;
    return;
  }
  ++c[i];
  for (int j = i + 1; j < k; ++j) c[j] = c[j - 1] + 1;
}

}  // namespace detail

// Eigenvalue estimation from R by fitting an order-M polynomial transfer function.
inline PolyFitResult polynomial_fit_eigenvalues(const Matrix& r, const PolyFitConfig& cfg = {}) {
  detail::require(cfg.m >= 1, "polyfit: order M must be >= 1");
  const Index n = r.rows();
  detail::require(r.rows() == r.cols(), "polyfit: R must be square");
  detail::require(n - 1 >= cfg.m, "polyfit: need N - 1 >= M");
  const int grid = cfg.grid_points > 0 ? cfg.grid_points : (cfg.m == 2 ? 50 : 25);
  detail::require(cfg.m == 1 || grid >= 2, "polyfit: grid_points must be >= 2");
  const SpectralDecomp e = eig_sym(r);
  detail::require(e.values.minCoeff() >= -1e-8 * std::max(1.0, e.values.cwiseAbs().maxCoeff()), "polyfit: R is not PSD");
  const Vector h = e.values.cwiseMax(0.0).cwiseSqrt();

  std::vector<Index> knots(cfg.m + 1);
  for (int i = 0; i <= cfg.m; ++i)
    knots[i] = static_cast<Index>(std::lround(static_cast<double>(i) * static_cast<double>(n - 1) / cfg.m));
  knots.back() = n - 1;
  for (int i = 1; i <= cfg.m; ++i) detail::require(knots[i] > knots[i - 1], "polyfit: knots collapse; reduce M");

  // candidate xi tuples in lexicographic order of grid indices
  std::vector<std::vector<double>> cands;
  if (cfg.m == 1) {
    cands.push_back({});
  } else {
    std::vector<int> c(cfg.m - 1);
    std::iota(c.begin(), c.end(), 1);
    bool done = grid < cfg.m - 1;
    while (!done) {
      std::vector<double> xi(c.size());
      for (size_t i = 0; i < c.size(); ++i) xi[i] = static_cast<double>(c[i]) / (grid + 1);
      cands.push_back(std::move(xi));
      detail::next_combination(c, grid, done);
    }
  }

  struct Eval {
    bool ok = false;
    double obj = 0.0;
    Vector lam;
  };
  std::vector<Eval> evals(cands.size());
  const Matrix& u = e.vectors;
  const double nn = static_cast<double>(n);
  parallel_for(cands.size(), [&](size_t ci) {
    std::vector<double> xs{0.0};
    xs.insert(xs.end(), cands[ci].begin(), cands[ci].end());
    xs.push_back(1.0);
    std::vector<double> ys(knots.size());
    for (size_t i = 0; i < knots.size(); ++i) ys[i] = h(knots[i]);
    constexpr int kCheck = 1000;
    double prev = detail::lagrange_eval(xs, ys, 0.0);
    const double scale = std::max(1.0, std::abs(ys.back()));
    for (int s = 1; s <= kCheck; ++s) {
      const double v = detail::lagrange_eval(xs, ys, static_cast<double>(s) / kCheck);
      if (v < prev - 1e-14 * scale) return;
      prev = v;
    }
    const double p0 = ys.front(), p1 = ys.back();
    Vector lam(n);
    for (Index k = 0; k < n; ++k) {
      const double tgt = h(k);
      if (tgt <= p0) {
        lam(k) = 0.0;
        continue;
      }
      if (tgt >= p1) {
        lam(k) = 1.0;
        continue;
      }
      double lo = 0.0, hi = 1.0;
      while (hi - lo > cfg.bisect_tol) {
        const double mid = 0.5 * (lo + hi);
        (detail::lagrange_eval(xs, ys, mid) < tgt ? lo : hi) = mid;
      }
      lam(k) = 0.5 * (lo + hi);
    }
    lam(0) = 0.0;  // knot m_0 = 0 always maps to 0
    const double sum = lam.sum();
    if (!(sum > 0.0)) return;
    lam *= nn / sum;
    const Matrix l = u * lam.asDiagonal() * u.transpose();
    evals[ci].ok = true;
    evals[ci].obj = l.lpNorm<1>() / std::sqrt(l.norm());
    evals[ci].lam = std::move(lam);
  });

  PolyFitResult out;
  out.knots = knots;
  Index best = -1;
  for (size_t ci = 0; ci < cands.size(); ++ci) {
    if (!evals[ci].ok) continue;
    out.curve.emplace_back(cands[ci], evals[ci].obj);
    if (best < 0 || evals[ci].obj < evals[best].obj) best = static_cast<Index>(ci);
  }
  if (best < 0)
    throw NumericalError("polyfit: no monotone polynomial on the xi grid; try a larger grid or smaller M");
  out.xi = cands[best];
  out.objective = evals[best].obj;
  out.eigenvalues = evals[best].lam;
  out.l = Laplacian{u * out.eigenvalues.asDiagonal() * u.transpose(), LaplacianKind::normalized};
  return out;
}

struct SourceLearnResult {
  Laplacian l;
  double asymmetry = 0.0;  // ||L - L^T||_F / ||L||_F before averaging
  bool used_lasso = false;
  bool rank_deficient = false;
  Index rank = 0;
};

// Laplacian from signals X and sources J with L X = J. Last vertex is the reference.
inline SourceLearnResult learn_from_sources(const Matrix& x, const Matrix& j, std::optional<double> rho = std::nullopt,
                                            int max_iter = 20000, double tol = 1e-10) {
  detail::require(x.rows() == j.rows() && x.cols() == j.cols(), "learn_from_sources: X and J shapes differ");
  const Index n = x.rows(), p = x.cols();
  detail::require(n >= 2 && p >= 1, "learn_from_sources: need N >= 2 and P >= 1");
  const Matrix xr = (x.rowwise() - x.row(n - 1)).topRows(n - 1);
  const Matrix jr = j.topRows(n - 1);
  SourceLearnResult out;
  out.rank = numerical_rank(xr);
  Matrix lred(n - 1, n - 1);
  if (!rho) {
    detail::require(p >= n - 1, "learn_from_sources: P < N - 1 needs the LASSO branch (give rho)");
    out.rank_deficient = out.rank < n - 1;
    lred = jr * pseudo_inverse(xr);
  } else {
    out.used_lasso = true;
    LassoConfig lc;
    lc.rho = *rho;
    lc.max_iter = max_iter;
    lc.tol = tol;
    const Matrix a = xr.transpose();
    const Matrix g = a.transpose() * a;
    std::vector<Vector> rows(n - 1);
    parallel_for(static_cast<size_t>(n - 1), [&](size_t k) {
      const Vector c = a.transpose() * jr.row(k).transpose();
      rows[k] = lasso_gram(g, c, lc).x;
    });
    for (Index k = 0; k < n - 1; ++k) lred.row(k) = rows[k].transpose();
  }
  Matrix l(n, n);
  l.topLeftCorner(n - 1, n - 1) = lred;
  l.topRightCorner(n - 1, 1) = -lred.rowwise().sum();
  l.bottomLeftCorner(1, n - 1) = -lred.colwise().sum();
  l(n - 1, n - 1) = lred.sum();
  const double nrm = l.norm();
  out.asymmetry = nrm > 0.0 ? (l - l.transpose()).norm() / nrm : 0.0;
  out.l = Laplacian{0.5 * (l + l.transpose()), LaplacianKind::combinatorial};
  return out;
}

}  // namespace graphtopo
