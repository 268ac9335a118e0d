#pragma once

#include "core.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

namespace graphtopo {

struct Lattice {
  std::vector<Index> dims;  // I_1..I_M, I_1 varies fastest in the linear index

  Index size() const {
    Index n = 1;
    for (Index d : dims) n *= d;
    return n;
  }

  void validate(Index guard = 100000) const {
    detail::require(!dims.empty(), "lattice needs at least one dimension");
    double n = 1.0;
    for (Index d : dims) {
      detail::require(d >= 1, "lattice extents must be >= 1");
      n *= static_cast<double>(d);
    }
    detail::require(n <= static_cast<double>(guard), "lattice has more than " + std::to_string(guard) + " vertices");
  }

  Index linear(const std::vector<Index>& sub) const {
    Index idx = 0, stride = 1;
    for (size_t m = 0; m < dims.size(); ++m) {
      idx += sub[m] * stride;
      stride *= dims[m];
    }
    return idx;
  }
};

inline Graph path_adjacency(Index i) {
  detail::require(i >= 1, "path_adjacency: extent must be >= 1");
  Matrix a = Matrix::Zero(i, i);
  for (Index k = 0; k + 1 < i; ++k) a(k, k + 1) = a(k + 1, k) = 1.0;
  return Graph(std::move(a));
}

// 2 cos(k pi / (I + 1)), k = 1..I, ascending
inline Vector path_adjacency_spectrum(Index i) {
  Vector v(i);
  for (Index k = 1; k <= i; ++k) v(i - k) = 2.0 * std::cos(static_cast<double>(k) * std::numbers::pi / static_cast<double>(i + 1));
  return v;
}

// A_M (+) ... (+) A_1, i.e. sum over axes of I (x) .. (x) A_m (x) .. (x) I
inline Graph kron_sum_adjacency(const Lattice& lat) {
  lat.validate();
  const Index n = lat.size();
  Matrix a = Matrix::Zero(n, n);
  Index stride = 1;
  for (Index d : lat.dims) {
    for (Index v = 0; v < n; ++v) {
      const Index coord = (v / stride) % d;
      if (coord + 1 < d) a(v, v + stride) = a(v + stride, v) = 1.0;
    }
    stride *= d;
  }
  return Graph(std::move(a));
}

inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// U = U_M (x) ... (x) U_1, Lambda = Lambda_M (+) ... (+) Lambda_1, co-sorted ascending (stable)
inline SpectralDecomp separable_gdft(const Lattice& lat) {
  lat.validate();
  Matrix u = Matrix::Ones(1, 1);
  Vector lam = Vector::Zero(1);
  for (Index d : lat.dims) {
    const SpectralDecomp e = eig_sym(path_adjacency(d).w());
    u = kron(e.vectors, u);
    Vector next(lam.size() * d);
    for (Index i = 0; i < d; ++i)
      for (Index j = 0; j < lam.size(); ++j) next(i * lam.size() + j) = e.values(i) + lam(j);
    lam = std::move(next);
  }
  std::vector<Index> order(lam.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return lam(a) < lam(b); });
  SpectralDecomp out{Vector(lam.size()), Matrix(u.rows(), u.cols())};
  for (size_t k = 0; k < order.size(); ++k) {
    out.values(k) = lam(order[k]);
    out.vectors.col(k) = u.col(order[k]);
  }
  return out;
}

struct SeparabilityResult {
  bool is_rank1 = false;
  bool degenerate = false;  // zero vector
  double ratio = 0.0;       // sigma_2 / sigma_1
  Vector a;                 // axis-1 factor (length I_1)
  Vector b;                 // axis-2 factor (length I_2), x = b (x) a
};

inline SeparabilityResult separability_check(const Vector& x, const Lattice& lat, double tol = 1e-8) {
  detail::require(lat.dims.size() == 2, "separability_check supports two-axis lattices only");
  lat.validate();
  const Index i1 = lat.dims[0], i2 = lat.dims[1];
  detail::require(x.size() == i1 * i2, "separability_check: vector length does not match lattice");
  SeparabilityResult out;
  if (x.cwiseAbs().maxCoeff() == 0.0) {
    out.degenerate = true;
    out.a = Vector::Zero(i1);
    out.b = Vector::Zero(i2);
    return out;
  }
  const Matrix m = Eigen::Map<const Matrix>(x.data(), i1, i2);
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& s = svd.singularValues();
  out.ratio = s.size() > 1 ? s(1) / s(0) : 0.0;
  out.is_rank1 = out.ratio < tol;
  const double r = std::sqrt(s(0));
  out.a = r * svd.matrixU().col(0);
  out.b = r * svd.matrixV().col(0);
  Index arg = 0;
  for (Index i = 1; i < out.a.size(); ++i)
    if (std::abs(out.a(i)) > std::abs(out.a(arg)) * (1.0 + 1e-12)) arg = i;
  if (out.a(arg) < 0.0) {
    out.a = -out.a;
    out.b = -out.b;
  }
  return out;
}

struct SamplingMap {
  std::vector<Index> kept;  // strictly increasing
};

inline Graph subsample(const Graph& g, const SamplingMap& map) {
  for (size_t k = 0; k < map.kept.size(); ++k) {
    detail::require(map.kept[k] >= 0 && map.kept[k] < g.n(), "subsample: index " + std::to_string(map.kept[k]) + " out of range");
    detail::require(k == 0 || map.kept[k] > map.kept[k - 1], "subsample: indices must be strictly increasing");
  }
  return Graph(take(g.w(), map.kept, map.kept));
}

}  // namespace graphtopo
