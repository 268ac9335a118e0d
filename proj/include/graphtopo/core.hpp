#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace graphtopo {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

struct InvalidArgument : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// singular systems, non-convergence under strict mode, etc.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

inline void require(bool ok, const std::string& msg) {
  if (!ok) throw InvalidArgument(msg);
}

inline double sym_defect(const Matrix& m) {
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  return (m - m.transpose()).cwiseAbs().maxCoeff() / scale;
}

inline bool finite(const Matrix& m) { return m.allFinite(); }

}  // namespace detail

// Undirected weighted graph: symmetric, zero diagonal, non-negative.
class Graph {
 public:
  Graph() = default;

  explicit Graph(Matrix w, double sym_tol = 1e-9) : w_(std::move(w)) {
    detail::require(w_.rows() == w_.cols(), "weight matrix must be square");
    detail::require(detail::finite(w_), "weight matrix has non-finite entries");
    if (w_.size() > 0) {
      detail::require(detail::sym_defect(w_) <= sym_tol, "weight matrix is not symmetric");
      w_ = 0.5 * (w_ + w_.transpose());
    }
    for (Index i = 0; i < w_.rows(); ++i) {
      detail::require(w_(i, i) == 0.0, "weight matrix diagonal must be zero (vertex " + std::to_string(i) + ")");
      for (Index j = 0; j < w_.cols(); ++j)
        detail::require(w_(i, j) >= 0.0, "negative weight at (" + std::to_string(i) + "," + std::to_string(j) + ")");
    }
  }

  static Graph empty(Index n) { return Graph(Matrix::Zero(n, n)); }

  static Graph from_edges(Index n, const std::vector<std::tuple<Index, Index, double>>& edges) {
    Matrix w = Matrix::Zero(n, n);
    for (auto [i, j, x] : edges) {
      detail::require(i >= 0 && j >= 0 && i < n && j < n, "edge index out of range");
      detail::require(i != j, "self-loop edges are not allowed");
      w(i, j) = x;
      w(j, i) = x;
    }
    return Graph(std::move(w));
  }

  Index n() const { return w_.rows(); }
  const Matrix& w() const { return w_; }
  Vector degrees() const { return w_.rowwise().sum(); }
  double volume() const { return w_.sum(); }

  Index edge_count() const {
    Index c = 0;
    for (Index i = 0; i < n(); ++i)
      for (Index j = i + 1; j < n(); ++j) c += w_(i, j) > 0.0;
    return c;
  }

 private:
  Matrix w_;
};

// Non-negative weights with zero diagonal; symmetry not required.
class DirectedGraph {
 public:
  DirectedGraph() = default;

  explicit DirectedGraph(Matrix w) : w_(std::move(w)) {
    detail::require(w_.rows() == w_.cols(), "weight matrix must be square");
    detail::require(detail::finite(w_), "weight matrix has non-finite entries");
    for (Index i = 0; i < w_.rows(); ++i) {
      detail::require(w_(i, i) == 0.0, "weight matrix diagonal must be zero");
      for (Index j = 0; j < w_.cols(); ++j) detail::require(w_(i, j) >= 0.0, "negative weight");
    }
  }

  Index n() const { return w_.rows(); }
  const Matrix& w() const { return w_; }
  Vector out_degrees() const { return w_.rowwise().sum(); }

 private:
  Matrix w_;
};

enum class LaplacianKind { combinatorial, normalized, generalized };

inline const char* to_string(LaplacianKind k) {
  switch (k) {
    case LaplacianKind::combinatorial: return "combinatorial";
    case LaplacianKind::normalized: return "normalized";
    case LaplacianKind::generalized: return "generalized";
  }
  return "?";
}

struct Laplacian {
  Matrix l;
  LaplacianKind kind = LaplacianKind::combinatorial;

  Index n() const { return l.rows(); }
};

inline Laplacian laplacian(const Graph& g, LaplacianKind kind = LaplacianKind::combinatorial,
                           bool strict = true) {
  const Vector d = g.degrees();
  if (kind != LaplacianKind::normalized) {
    Matrix l = -g.w();
    l.diagonal() = d;
    return {std::move(l), kind};
  }
  Vector s(g.n());
  for (Index i = 0; i < g.n(); ++i) {
    if (d(i) <= 0.0) {
      if (strict) throw InvalidArgument("isolated vertex " + std::to_string(i) + " has no normalized Laplacian row");
      s(i) = 0.0;
    } else {
      s(i) = 1.0 / std::sqrt(d(i));
    }
  }
  Matrix l = -(s.asDiagonal() * g.w() * s.asDiagonal());
  for (Index i = 0; i < g.n(); ++i) l(i, i) = d(i) > 0.0 ? 1.0 : 0.0;
  return {std::move(l), kind};
}

// Validate a caller-supplied generalized Laplacian Q = L + P.
inline Laplacian generalized_laplacian(const Matrix& q, double tol = 1e-9) {
  detail::require(q.rows() == q.cols(), "matrix must be square");
  detail::require(detail::sym_defect(q) <= tol, "generalized Laplacian must be symmetric");
  Matrix s = 0.5 * (q + q.transpose());
  const double scale = std::max(1.0, s.cwiseAbs().maxCoeff());
  for (Index i = 0; i < s.rows(); ++i) {
    for (Index j = 0; j < s.cols(); ++j)
      if (i != j) detail::require(s(i, j) <= tol * scale, "generalized Laplacian has a positive off-diagonal");
    detail::require(s.row(i).sum() >= -tol * scale, "generalized Laplacian has a negative row sum");
  }
  return {std::move(s), LaplacianKind::generalized};
}

// Weight matrix implied by the off-diagonal of a Laplacian.
inline Matrix weights_of(const Matrix& l) {
  Matrix w = -l;
  w.diagonal().setZero();
  return w;
}

struct SpectralDecomp {
  Vector values;   // ascending
  Matrix vectors;  // columns
};

// Largest-magnitude entry of each eigenvector made positive; ties go to the lowest index.
inline void fix_signs(Matrix& u) {
  for (Index k = 0; k < u.cols(); ++k) {
    Index arg = 0;
    double best = -1.0;
    for (Index i = 0; i < u.rows(); ++i) {
      const double a = std::abs(u(i, k));
      if (a > best * (1.0 + 1e-12) + 1e-15) {
        best = a;
        arg = i;
      }
    }
    if (u(arg, k) < 0.0) u.col(k) = -u.col(k);
  }
}

inline SpectralDecomp eig_sym(const Matrix& m, double sym_tol = 1e-9) {
  detail::require(m.rows() == m.cols(), "eig_sym needs a square matrix");
  detail::require(detail::finite(m), "eig_sym input has non-finite entries");
  if (m.size() == 0) return {};
  detail::require(detail::sym_defect(m) <= sym_tol, "eig_sym input is not symmetric");
  const Matrix s = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(s);
  if (es.info() != Eigen::Success) throw NumericalError("symmetric eigensolver failed");
  SpectralDecomp out{es.eigenvalues(), es.eigenvectors()};
  fix_signs(out.vectors);
  return out;
}

inline Matrix pseudo_inverse(const Matrix& m, double rank_tol = 1e-10) {
  if (m.size() == 0) return Matrix(m.cols(), m.rows());
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& s = svd.singularValues();
  const double cut = rank_tol * (s.size() ? s(0) : 0.0);
  Vector inv = Vector::Zero(s.size());
  for (Index i = 0; i < s.size(); ++i)
    if (s(i) > cut && s(i) > 0.0) inv(i) = 1.0 / s(i);
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

inline Index numerical_rank(const Matrix& m, double rank_tol = 1e-10) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<Matrix> svd(m);
  const Vector& s = svd.singularValues();
  Index r = 0;
  for (Index i = 0; i < s.size(); ++i) r += s(i) > rank_tol * s(0) && s(i) > 0.0;
  return r;
}

inline double condition_number(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m);
  const Vector& s = svd.singularValues();
  if (s.size() == 0) return 1.0;
  const double lo = s(s.size() - 1);
  return lo > 0.0 ? s(0) / lo : std::numeric_limits<double>::infinity();
}

inline double smoothness(const Laplacian& l, const Vector& x) {
  detail::require(l.n() == x.size(), "smoothness: dimension mismatch");
  return x.dot(l.l * x);
}

// External injections; Kirchhoff balance checked when asked.
struct SourceVector {
  Vector i;

  SourceVector() = default;
  explicit SourceVector(Vector v, bool balanced = true, double tol = 1e-9) : i(std::move(v)) {
    if (balanced && std::abs(i.sum()) > tol)
      throw InvalidArgument("source vector does not sum to zero (sum = " + std::to_string(i.sum()) + ")");
  }
  static SourceVector zero(Index n) { return SourceVector(Vector::Zero(n)); }
};

inline bool is_connected(const Graph& g) {
  const Index n = g.n();
  if (n <= 1) return true;
  std::vector<char> seen(n, 0);
  std::vector<Index> stack{0};
  seen[0] = 1;
  Index count = 1;
  while (!stack.empty()) {
    Index v = stack.back();
    stack.pop_back();
    for (Index u = 0; u < n; ++u)
      if (!seen[u] && g.w()(v, u) > 0.0) {
        seen[u] = 1;
        ++count;
        stack.push_back(u);
      }
  }
  return count == n;
}

// component label per vertex, labels in order of lowest member
inline std::vector<Index> components(const Matrix& w) {
  const Index n = w.rows();
  std::vector<Index> lab(n, -1);
  Index next = 0;
  for (Index s = 0; s < n; ++s) {
    if (lab[s] >= 0) continue;
    std::vector<Index> stack{s};
    lab[s] = next;
    while (!stack.empty()) {
      Index v = stack.back();
      stack.pop_back();
      for (Index u = 0; u < n; ++u)
        if (lab[u] < 0 && w(v, u) > 0.0) {
          lab[u] = next;
          stack.push_back(u);
        }
    }
    ++next;
  }
  return lab;
}

// rows/cols of m at idx
inline Matrix take(const Matrix& m, const std::vector<Index>& rows, const std::vector<Index>& cols) {
  Matrix out(rows.size(), cols.size());
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t j = 0; j < cols.size(); ++j) out(i, j) = m(rows[i], cols[j]);
  return out;
}

inline Vector take(const Vector& v, const std::vector<Index>& idx) {
  Vector out(idx.size());
  for (size_t i = 0; i < idx.size(); ++i) out(i) = v(idx[i]);
  return out;
}

inline std::vector<Index> complement(Index n, const std::vector<Index>& idx) {
  std::vector<char> in(n, 0);
  for (Index i : idx) in[i] = 1;
  std::vector<Index> out;
  for (Index i = 0; i < n; ++i)
    if (!in[i]) out.push_back(i);
  return out;
}

// mean squared error in dB
inline double mse_db(const Matrix& a, const Matrix& b) {
  detail::require(a.rows() == b.rows() && a.cols() == b.cols(), "mse_db: shape mismatch");
  const double mse = (a - b).squaredNorm() / static_cast<double>(a.size());
  return 10.0 * std::log10(mse);
}

}  // namespace graphtopo
