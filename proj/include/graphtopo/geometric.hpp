#pragma once

#include "core.hpp"
#include "parallel.hpp"
#include "random.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace graphtopo {

enum class KernelKind { gauss_sq, exp_lin, inv_dist, binary };

inline KernelKind parse_kernel(const std::string& s) {
  if (s == "gauss_sq" || s == "gauss") return KernelKind::gauss_sq;
  if (s == "exp_lin" || s == "exp") return KernelKind::exp_lin;
  if (s == "inv_dist") return KernelKind::inv_dist;
  if (s == "binary") return KernelKind::binary;
  throw InvalidArgument("unknown kernel '" + s + "' (gauss_sq, exp_lin, inv_dist, binary)");
}

struct KernelSpec {
  KernelKind kind = KernelKind::gauss_sq;
  double tau = 1.0;
  double kappa = std::numeric_limits<double>::infinity();

  void validate() const {
    detail::require(tau > 0.0, "kernel tau must be > 0");
    detail::require(kappa > 0.0, "kernel kappa must be > 0");
  }
};

inline double kernel_value(const KernelSpec& k, double r) {
  switch (k.kind) {
    case KernelKind::gauss_sq: return std::exp(-(r * r) / (k.tau * k.tau));
    case KernelKind::exp_lin: return std::exp(-r / k.tau);
    case KernelKind::inv_dist:
      if (r == 0.0) throw InvalidArgument("inverse-distance kernel is singular at zero distance");
      return 1.0 / r;
    case KernelKind::binary: return 1.0;
  }
  return 0.0;
}

// weights from a symmetric distance matrix
inline Matrix kernel_weights(const Matrix& dist, const KernelSpec& k) {
  k.validate();
  const Index n = dist.rows();
  Matrix w = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) {
      const double r = dist(i, j);
      if (r > k.kappa) continue;
      if (r == 0.0 && k.kind == KernelKind::inv_dist)
        throw InvalidArgument("inverse-distance kernel: vertices " + std::to_string(i) + " and " + std::to_string(j) +
                              " coincide");
      w(i, j) = w(j, i) = kernel_value(k, r);
    }
  return w;
}

inline Matrix pairwise_distances(const Matrix& coords) {
  const Index n = coords.rows();
  Matrix d = Matrix::Zero(n, n);
  parallel_for(static_cast<size_t>(n), [&](size_t i) {
    for (Index j = 0; j < n; ++j) d(i, j) = (coords.row(i) - coords.row(j)).norm();
  });
  return d;
}

inline Graph geometric_weights(const Matrix& coords, const KernelSpec& k) {
  detail::require(coords.cols() >= 1, "vertex cloud needs d >= 1");
  detail::require(coords.allFinite(), "vertex cloud has non-finite coordinates");
  return Graph(kernel_weights(pairwise_distances(coords), k));
}

enum class SimilarityNorm { global, energy };

struct SimilarityResult {
  Graph g;
  Matrix r2;
  bool degenerate = false;  // all observations identical
};

// global: r2_mn = S_mn / sum S;  energy: r2_mn = S_mn / sqrt(E_m E_n), S_mn = sum_p (x_p(m) - x_p(n))^2
inline SimilarityResult similarity_weights(const Matrix& x, const KernelSpec& k,
                                           SimilarityNorm norm = SimilarityNorm::global) {
  k.validate();
  detail::require(x.cols() >= 1, "similarity_weights: need P >= 1");
  detail::require(x.allFinite(), "similarity_weights: non-finite observations");
  const Index n = x.rows();
  Matrix s(n, n);
  parallel_for(static_cast<size_t>(n), [&](size_t i) {
    for (Index j = 0; j < n; ++j) s(i, j) = (x.row(i) - x.row(j)).squaredNorm();
  });
  SimilarityResult out;
  const double total = s.sum();
  if (total == 0.0) {
    Matrix w = Matrix::Ones(n, n);
    w.diagonal().setZero();
    out.g = Graph(std::move(w));
    out.r2 = Matrix::Zero(n, n);
    out.degenerate = true;
    return out;
  }
  if (norm == SimilarityNorm::global) {
    out.r2 = s / total;
  } else {
    const Vector e = x.rowwise().squaredNorm();
    out.r2 = Matrix::Zero(n, n);
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j) {
        if (i == j) continue;
        const double den = std::sqrt(e(i) * e(j));
        if (den == 0.0) throw InvalidArgument("similarity_weights: zero-energy vertex under energy normalisation");
        out.r2(i, j) = s(i, j) / den;
      }
  }
  out.g = Graph(kernel_weights(out.r2.cwiseSqrt(), k));
  return out;
}

// (a - b)^T H (a - b)
inline double generalized_distance(const Vector& a, const Vector& b, const Matrix& h) {
  detail::require(a.size() == b.size() && h.rows() == a.size() && h.cols() == a.size(),
                  "generalized_distance: dimension mismatch");
  detail::require(detail::sym_defect(h) <= 1e-9, "generalized_distance: H must be symmetric");
  const Vector d = a - b;
  const double v = d.dot(h * d);
  const double scale = std::max(1.0, h.cwiseAbs().maxCoeff() * d.squaredNorm());
  if (v < -1e-12 * scale) throw InvalidArgument("generalized_distance: H is not positive semidefinite");
  return std::max(v, 0.0);
}

// antiderivative of sqrt(1 + v^2)
inline double swiss_roll_arc_primitive(double v) {
  const double s = std::sqrt(v * v + 1.0);
  return 0.5 * v * s + 0.5 * std::log(s + v);
}

// arclength along the roll between angles v1 and v2, scaled by 1/(4 pi)
inline double swiss_roll_arclength(double v1, double v2) {
  return std::abs(swiss_roll_arc_primitive(v2) - swiss_roll_arc_primitive(v1)) / (4.0 * std::numbers::pi);
}

struct SwissRoll {
  Graph g;
  Matrix coords;  // N x 3
  Vector u, v;    // sampled parameters
  Matrix geodesic;
};

inline SwissRoll swiss_roll_graph(Index n, std::uint64_t seed, const KernelSpec& k) {
  detail::require(n >= 2, "swiss_roll_graph: need n >= 2");
  k.validate();
  Rng rng(seed);
  SwissRoll out;
  out.u.resize(n);
  out.v.resize(n);
  out.coords.resize(n, 3);
  const double pi = std::numbers::pi;
  for (Index i = 0; i < n; ++i) {
    out.u(i) = rng.uniform(-1.0, 1.0);
    out.v(i) = rng.uniform(pi, 4.0 * pi);
    const double v = out.v(i);
    out.coords(i, 0) = v * std::cos(v) / (4.0 * pi);
    out.coords(i, 1) = out.u(i);
    out.coords(i, 2) = v * std::sin(v) / (4.0 * pi);
  }
  out.geodesic = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) {
      const double l = swiss_roll_arclength(out.v(i), out.v(j));
      const double dy = out.u(i) - out.u(j);
      out.geodesic(i, j) = out.geodesic(j, i) = std::sqrt(l * l + dy * dy);
    }
  out.g = Graph(kernel_weights(out.geodesic, k));
  return out;
}

}  // namespace graphtopo
