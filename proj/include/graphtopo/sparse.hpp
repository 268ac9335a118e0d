#pragma once

#include "core.hpp"

#include <cmath>
#include <optional>
#include <vector>

namespace graphtopo {

template <class T>
constexpr T soft_threshold(T y, T t) {
  if (y < -t) return y + t;
  if (y > t) return y - t;
  return T(0);
}

inline Vector soft_threshold(const Vector& y, double t) {
  return y.unaryExpr([t](double v) { return soft_threshold(v, t); });
}

struct LassoConfig {
  double rho = 0.0;
  int max_iter = 1000;
  double tol = 1e-8;
  bool trace = false;           // record objective per iteration
  bool check_monotone = false;  // throw if the objective ever increases
};

struct LassoResult {
  Vector x;
  bool converged = false;
  int iterations = 0;
  double alpha = 0.0;
  std::vector<double> objective;  // ||y - AX||^2 + rho ||X||_1 (minus ||y||^2 in Gram form)
};

// Largest eigenvalue of a symmetric PSD matrix by power iteration.
inline double power_lambda_max(const Matrix& g, double rel_tol = 1e-6, int max_iter = 500) {
  const Index n = g.rows();
  if (n == 0) return 0.0;
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = 1.0 + 0.01 * static_cast<double>(i % 7);
  v.normalize();
  double lam = 0.0;
  for (int k = 0; k < max_iter; ++k) {
    Vector w = g * v;
    const double nrm = w.norm();
    if (nrm == 0.0) return 0.0;
    const double next = v.dot(w);
    v = w / nrm;
    if (k > 0 && std::abs(next - lam) <= rel_tol * std::abs(next)) return std::max(next, nrm);
    lam = next;
  }
  return std::max(lam, (g * v).norm());
}

namespace detail {

// ISTA on f(X) = X^T G X - 2 c^T X + rho ||X||_1, i.e. ||y - AX||^2 + rho||X||_1 - ||y||^2
// with G = A^T A and c = A^T y.
inline LassoResult ista_gram(const Matrix& g, const Vector& c, const LassoConfig& cfg, const Vector& x0,
                             double lam_max) {
  require(cfg.rho >= 0.0, "lasso: rho must be >= 0");
  require(cfg.max_iter >= 1, "lasso: max_iter must be >= 1");
  require(cfg.tol > 0.0, "lasso: tol must be > 0");
  if (!(lam_max > 0.0)) throw InvalidArgument("lasso: system matrix is zero");
  LassoResult out;
  // paper: alpha <- 2 max eig, X <- soft(X + A^T(y - AX)/alpha, rho/alpha); tiny inflation guards
  // the power-iteration underestimate
  const double two_lmax = 2.0 * lam_max * (1.0 + 1e-3);
  out.alpha = 1.0 / two_lmax;
  const double thr = cfg.rho * out.alpha;
  Vector x = x0;
  auto objective = [&](const Vector& v) { return v.dot(g * v) - 2.0 * c.dot(v) + cfg.rho * v.lpNorm<1>(); };
  double prev_obj = (cfg.trace || cfg.check_monotone) ? objective(x) : 0.0;
  if (cfg.trace) out.objective.push_back(prev_obj);
  for (int k = 1; k <= cfg.max_iter; ++k) {
    Vector next = soft_threshold(x + 2.0 * out.alpha * (c - g * x), thr);
    const double step = (next - x).norm();
    const double base = std::max(x.norm(), 1e-12);
    x.swap(next);
    out.iterations = k;
    if (cfg.trace || cfg.check_monotone) {
      const double obj = objective(x);
      if (cfg.trace) out.objective.push_back(obj);
      if (cfg.check_monotone && obj > prev_obj + 1e-10 * std::max(1.0, std::abs(prev_obj)))
        throw NumericalError("lasso objective increased at iteration " + std::to_string(k));
      prev_obj = obj;
    }
    if (step / base < cfg.tol) {
      out.converged = true;
      break;
    }
  }
  out.x = std::move(x);
  return out;
}

}  // namespace detail

// Minimises ||y - AX||^2 + rho ||X||_1 by ISTA, starting at X0 = A^T y unless x0 given.
inline LassoResult lasso_ista(const Matrix& a, const Vector& y, const LassoConfig& cfg,
                              const std::optional<Vector>& x0 = std::nullopt) {
  detail::require(a.rows() == y.size(), "lasso: A has " + std::to_string(a.rows()) + " rows but y has " +
                                            std::to_string(y.size()) + " entries");
  if (a.size() == 0 || a.cwiseAbs().maxCoeff() == 0.0) throw InvalidArgument("lasso: A is the zero matrix");
  const Matrix g = a.transpose() * a;
  const Vector c = a.transpose() * y;
  Vector start = x0 ? *x0 : c;
  detail::require(start.size() == a.cols(), "lasso: warm start has wrong size");
  LassoResult r = detail::ista_gram(g, c, cfg, start, power_lambda_max(g));
  if (cfg.trace) {
    const double yy = y.squaredNorm();
    for (double& o : r.objective) o += yy;
  }
  return r;
}

// Same iteration given only G = A^T A and c = A^T y.
inline LassoResult lasso_gram(const Matrix& g, const Vector& c, const LassoConfig& cfg,
                              const std::optional<Vector>& x0 = std::nullopt) {
  detail::require(g.rows() == g.cols() && g.rows() == c.size(), "lasso_gram: dimension mismatch");
  if (g.size() == 0 || g.cwiseAbs().maxCoeff() == 0.0) throw InvalidArgument("lasso: A is the zero matrix");
  return detail::ista_gram(g, c, cfg, x0 ? *x0 : c, power_lambda_max(g));
}

// Symmetric PSD square root, negative eigenvalues clamped to zero.
inline Matrix sqrt_psd(const Matrix& m) {
  const SpectralDecomp e = eig_sym(m, 1e-8);
  const Vector s = e.values.cwiseMax(0.0).cwiseSqrt();
  return e.vectors * s.asDiagonal() * e.vectors.transpose();
}

struct GlassoConfig {
  double rho = 0.0;
  int max_sweeps = 100;
  double eps = 1e-4;
  int inner_max_iter = 20000;
  double inner_tol = 1e-12;
};

struct GlassoResult {
  Matrix q;  // precision estimate V^{-1}
  Matrix v;  // covariance estimate
  int sweeps = 0;
  bool converged = false;
  double condition = 1.0;
};

// Column-by-column graphical LASSO. Each subproblem is lasso(sqrt(V11), V11^{-1/2} r12), solved in
// Gram form since sqrt(V11)^T sqrt(V11) = V11 and sqrt(V11)^T V11^{-1/2} r12 = r12.
inline GlassoResult glasso(const Matrix& r, const GlassoConfig& cfg = {}) {
  detail::require(r.rows() == r.cols(), "glasso: R must be square");
  detail::require(cfg.rho >= 0.0, "glasso: rho must be >= 0");
  detail::require(cfg.max_sweeps >= 1, "glasso: max_sweeps must be >= 1");
  detail::require(detail::sym_defect(r) <= 1e-9, "glasso: R must be symmetric");
  const Index n = r.rows();
  const Matrix rs = 0.5 * (r + r.transpose());
  {
    const double lo = eig_sym(rs).values.minCoeff();
    detail::require(n == 0 || lo >= -1e-8 * std::max(1.0, rs.cwiseAbs().maxCoeff()), "glasso: R is not PSD");
  }
  GlassoResult out;
  Matrix off = rs;
  off.diagonal().setZero();
  const double cp = n > 0 ? off.cwiseAbs().mean() * cfg.eps : 0.0;
  Matrix v0 = rs;
  v0.diagonal().array() += cfg.rho;
  Matrix v = v0;
  std::vector<Vector> beta(n);
  LassoConfig lc;
  lc.rho = 2.0 * cfg.rho;  // lasso objective is ||.||^2, not 1/2 ||.||^2
  lc.max_iter = cfg.inner_max_iter;
  lc.tol = cfg.inner_tol;
  for (int s = 1; s <= cfg.max_sweeps && n > 1; ++s) {
    out.sweeps = s;
    for (Index j = n - 1; j >= 0; --j) {
      std::vector<Index> idx;
      for (Index i = 0; i < n; ++i)
        if (i != j) idx.push_back(i);
      const Matrix v11 = take(v, idx, idx);
      Vector r12(n - 1);
      for (Index i = 0; i < n - 1; ++i) r12(i) = rs(idx[i], j);
      if (v11.cwiseAbs().maxCoeff() == 0.0) continue;
      std::optional<Vector> warm;
      if (beta[j].size()) warm = beta[j];
      beta[j] = lasso_gram(v11, r12, lc, warm).x;
      const Vector v12 = v11 * beta[j];
      for (Index i = 0; i < n - 1; ++i) {
        v(idx[i], j) = v12(i);
        v(j, idx[i]) = v12(i);
      }
    }
    const double diff = (v - v0).cwiseAbs().mean();
    if (diff < cp || diff == 0.0) {
      out.converged = true;
      break;
    }
    v0 = v;
  }
  if (n <= 1) out.converged = true;
  out.condition = condition_number(v);
  if (!std::isfinite(out.condition) || out.condition > 1e14)
    throw NumericalError("glasso: covariance estimate is singular (condition number " + std::to_string(out.condition) + ")");
  out.q = v.inverse();
  out.q = 0.5 * (out.q + out.q.transpose());
  out.v = std::move(v);
  return out;
}

struct PrecisionResult {
  Matrix q;
  Index rank = 0;
  bool rank_deficient = false;
};

inline PrecisionResult precision_matrix(const Matrix& r, double rank_tol = 1e-10) {
  detail::require(r.rows() == r.cols(), "precision_matrix: R must be square");
  detail::require(detail::sym_defect(r) <= 1e-9, "precision_matrix: R must be symmetric");
  PrecisionResult out;
  out.rank = numerical_rank(r, rank_tol);
  out.rank_deficient = out.rank < r.rows();
  if (out.rank_deficient) {
    out.q = pseudo_inverse(r, rank_tol);
  } else {
    out.q = r.fullPivLu().inverse();
  }
  out.q = 0.5 * (out.q + out.q.transpose());
  return out;
}

inline Matrix normalize_precision(const Matrix& q) {
  detail::require(q.rows() == q.cols(), "normalize_precision: matrix must be square");
  const Index n = q.rows();
  Vector s(n);
  for (Index i = 0; i < n; ++i) {
    if (!(q(i, i) > 0.0)) throw InvalidArgument("normalize_precision: non-positive diagonal at " + std::to_string(i));
    s(i) = 1.0 / std::sqrt(q(i, i));
  }
  Matrix out = s.asDiagonal() * q * s.asDiagonal();
  out.diagonal().setOnes();
  return out;
}

}  // namespace graphtopo
