#pragma once

#include "core.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <limits>
#include <vector>

namespace graphtopo {

// T x N returns, sample covariance (1/(T-1))
inline Matrix return_covariance(const Matrix& r) {
  detail::require(r.rows() >= 2, "returns need T >= 2 periods");
  detail::require(r.allFinite(), "returns contain non-finite values");
  const Matrix c = r.rowwise() - r.colwise().mean();
  return (c.transpose() * c) / static_cast<double>(r.rows() - 1);
}

// Returns from a T x N price table.
inline Matrix returns_from_prices(const Matrix& p) {
  detail::require(p.rows() >= 2, "need at least two price rows");
  Matrix r(p.rows() - 1, p.cols());
  for (Index t = 1; t < p.rows(); ++t)
    for (Index j = 0; j < p.cols(); ++j) {
      detail::require(p(t - 1, j) != 0.0, "zero price for asset " + std::to_string(j));
      r(t - 1, j) = (p(t, j) - p(t - 1, j)) / p(t - 1, j);
    }
  return r;
}

inline Graph market_graph(const Matrix& returns) {
  const Matrix s = return_covariance(returns);
  const Index n = s.rows();
  for (Index i = 0; i < n; ++i)
    if (!(s(i, i) > 0.0)) throw InvalidArgument("market_graph: asset " + std::to_string(i) + " has zero variance");
  Matrix w(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) w(i, j) = i == j ? 0.0 : std::abs(s(i, j)) / std::sqrt(s(i, i) * s(j, j));
  return Graph(0.5 * (w + w.transpose()));
}

// w = S^{-1} 1 / (1^T S^{-1} 1). Singular S is an error: no pseudo-inverse fallback.
inline Vector min_variance_weights(const Matrix& sigma) {
  detail::require(sigma.rows() == sigma.cols() && sigma.rows() >= 1, "min_variance_weights: sigma must be square");
  const double cond = condition_number(sigma);
  if (!std::isfinite(cond) || cond > 1e12)
    throw NumericalError("min_variance_weights: covariance is singular (condition number " + std::to_string(cond) +
                         "); a pseudo-inverse is deliberately not substituted");
  const Vector z = sigma.fullPivLu().solve(Vector::Ones(sigma.rows()));
  return z / z.sum();
}

enum class CutKind { normalized, volume };

struct Bipartition {
  std::vector<Index> first, second;
};

inline Bipartition bipartition_from_sides(const std::vector<bool>& in_first) {
  Bipartition b;
  for (size_t i = 0; i < in_first.size(); ++i) (in_first[i] ? b.first : b.second).push_back(static_cast<Index>(i));
  return b;
}

inline double cross_weight(const Graph& g, const Bipartition& p) {
  double c = 0.0;
  for (Index i : p.first)
    for (Index j : p.second) c += g.w()(i, j);
  return c;
}

inline double cut_value(const Graph& g, const Bipartition& p, CutKind kind) {
  detail::require(!p.first.empty() && !p.second.empty(), "cut_value: both sides must be non-empty");
  const double c = cross_weight(g, p);
  if (kind == CutKind::normalized)
    return c * (1.0 / static_cast<double>(p.first.size()) + 1.0 / static_cast<double>(p.second.size()));
  const Vector d = g.degrees();
  double v1 = 0.0, v2 = 0.0;
  for (Index i : p.first) v1 += d(i);
  for (Index i : p.second) v2 += d(i);
  if (v1 == 0.0 || v2 == 0.0) throw InvalidArgument("cut_value: a side has zero volume");
  return c * (1.0 / v1 + 1.0 / v2);
}

// Indicator whose (generalised) Rayleigh quotient equals the cut value:
// normalized x = 1/N1 on first, -1/N2 on second; volume uses 1/V1, -1/V2.
inline Vector cut_indicator(const Graph& g, const Bipartition& p, CutKind kind) {
  Vector x = Vector::Zero(g.n());
  const Vector d = g.degrees();
  double a = static_cast<double>(p.first.size()), b = static_cast<double>(p.second.size());
  if (kind == CutKind::volume) {
    a = b = 0.0;
    for (Index i : p.first) a += d(i);
    for (Index i : p.second) b += d(i);
  }
  for (Index i : p.first) x(i) = 1.0 / a;
  for (Index i : p.second) x(i) = -1.0 / b;
  return x;
}

struct BisectResult {
  Bipartition part;
  bool disconnected = false;
  double value = 0.0;
};

// Sign of the Fiedler vector; zero entries go to the first (positive) side.
inline BisectResult spectral_bisect(const Graph& g, CutKind kind) {
  const Index n = g.n();
  detail::require(n >= 2, "spectral_bisect: need N >= 2");
  BisectResult out;
  if (!is_connected(g)) {
    const auto lab = components(g.w());
    std::vector<bool> side(n);
    for (Index i = 0; i < n; ++i) side[i] = lab[i] == 0;
    out.part = bipartition_from_sides(side);
    out.disconnected = true;
    out.value = 0.0;
    return out;
  }
  const Matrix l = laplacian(g).l;
  Vector f;
  if (kind == CutKind::normalized) {
    f = eig_sym(l).vectors.col(1);
  } else {
    const Vector s = g.degrees().cwiseSqrt().cwiseInverse();
    const Matrix m = s.asDiagonal() * l * s.asDiagonal();
    f = s.asDiagonal() * eig_sym(m).vectors.col(1);
  }
  // numerically zero entries (e.g. degenerate Fiedler pairs) go to whichever side lowers the cut
  const double zero = 1e-10 * f.cwiseAbs().maxCoeff();
  std::vector<bool> side(n);
  std::vector<Index> undecided;
  for (Index i = 0; i < n; ++i) {
    side[i] = f(i) >= 0.0;
    if (std::abs(f(i)) <= zero) undecided.push_back(i);
  }
  for (Index i : undecided) {
    double best = std::numeric_limits<double>::infinity();
    bool pick = true;
    for (bool s : {true, false}) {
      side[i] = s;
      const bool both = std::find(side.begin(), side.end(), true) != side.end() &&
                        std::find(side.begin(), side.end(), false) != side.end();
      if (!both) continue;
      const double v = cut_value(g, bipartition_from_sides(side), kind);
      if (v < best) {
        best = v;
        pick = s;
      }
    }
    side[i] = pick;
  }
  out.part = bipartition_from_sides(side);
  out.value = cut_value(g, out.part, kind);
  return out;
}

struct CutNode {
  std::vector<Index> vertices;  // sorted
  int depth = 0;
  int parent = -1, left = -1, right = -1;
};

struct CutTree {
  std::vector<CutNode> nodes;  // nodes[0] is the root
  std::vector<std::string> warnings;

  static CutTree root(Index n) {
    CutTree t;
    CutNode r;
    r.vertices.resize(n);
    for (Index i = 0; i < n; ++i) r.vertices[i] = i;
    t.nodes.push_back(std::move(r));
    return t;
  }

  // split a leaf into two parts of its vertex set; returns the child indices
  std::pair<int, int> split(int node, std::vector<Index> a, std::vector<Index> b) {
    detail::require(node >= 0 && node < static_cast<int>(nodes.size()), "CutTree::split: bad node");
    detail::require(nodes[node].left < 0, "CutTree::split: node is not a leaf");
    detail::require(!a.empty() && !b.empty(), "CutTree::split: empty side");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::vector<Index> u;
    std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(u));
    detail::require(u == nodes[node].vertices, "CutTree::split: children must partition the parent");
    const int d = nodes[node].depth + 1;
    CutNode l{std::move(a), d, node, -1, -1}, r{std::move(b), d, node, -1, -1};
    nodes.push_back(std::move(l));
    nodes.push_back(std::move(r));
    const int li = static_cast<int>(nodes.size()) - 2;
    nodes[node].left = li;
    nodes[node].right = li + 1;
    return {li, li + 1};
  }

  std::vector<int> leaves() const {
    std::vector<int> out;
    for (size_t i = 0; i < nodes.size(); ++i)
      if (nodes[i].left < 0) out.push_back(static_cast<int>(i));
    return out;
  }

  Index vertex_count() const { return nodes.empty() ? 0 : static_cast<Index>(nodes[0].vertices.size()); }
};

enum class LeafSelect { largest_size, largest_volume };

// k bisections, each applied to the best-ranked splittable leaf.
inline CutTree repeated_cuts(const Graph& g, int k, LeafSelect select = LeafSelect::largest_size,
                             CutKind kind = CutKind::normalized) {
  const Index n = g.n();
  detail::require(n >= 1, "repeated_cuts: empty graph");
  detail::require(k >= 0 && k <= n - 1, "repeated_cuts: need 0 <= k <= N - 1");
  CutTree t = CutTree::root(n);
  const Vector deg = g.degrees();
  for (int c = 0; c < k; ++c) {
    auto leaves = t.leaves();
    auto score = [&](int leaf) {
      if (select == LeafSelect::largest_size) return static_cast<double>(t.nodes[leaf].vertices.size());
      double v = 0.0;
      for (Index i : t.nodes[leaf].vertices) v += deg(i);
      return v;
    };
    std::stable_sort(leaves.begin(), leaves.end(), [&](int a, int b) {
      const double sa = score(a), sb = score(b);
      if (sa != sb) return sa > sb;
      return t.nodes[a].vertices.front() < t.nodes[b].vertices.front();
    });
    bool done = false;
    for (int leaf : leaves) {
      const auto& vs = t.nodes[leaf].vertices;
      if (vs.size() < 2) {
        t.warnings.push_back("leaf with a single vertex (" + std::to_string(vs.front()) + ") skipped");
        continue;
      }
      const Graph sub(take(g.w(), vs, vs));
      const BisectResult b = spectral_bisect(sub, kind);
      std::vector<Index> a1, a2;
      for (Index i : b.part.first) a1.push_back(vs[i]);
      for (Index i : b.part.second) a2.push_back(vs[i]);
      if (a1.empty() || a2.empty()) {
        // degenerate Fiedler sign pattern: peel off the last vertex
        a1.assign(vs.begin(), vs.end() - 1);
        a2.assign(1, vs.back());
        t.warnings.push_back("degenerate Fiedler vector; split off vertex " + std::to_string(vs.back()));
      }
      t.split(leaf, std::move(a1), std::move(a2));
      done = true;
      break;
    }
    if (!done) {
      t.warnings.push_back("no splittable leaf left after " + std::to_string(c) + " cuts");
      break;
    }
  }
  return t;
}

enum class AllocScheme { as1, as2 };

// AS1: leaf weight 2^-depth; AS2: 1/(K+1); split equally inside the leaf.
inline Vector allocate(const CutTree& t, AllocScheme scheme) {
  const Index n = t.vertex_count();
  Vector w = Vector::Zero(n);
  const auto leaves = t.leaves();
  for (int leaf : leaves) {
    const auto& node = t.nodes[leaf];
    const double cw = scheme == AllocScheme::as1 ? std::ldexp(1.0, -node.depth) : 1.0 / static_cast<double>(leaves.size());
    for (Index i : node.vertices) w(i) += cw / static_cast<double>(node.vertices.size());
  }
  if (n > 0 && std::abs(w.sum() - 1.0) > 1e-12)
    throw NumericalError("allocate: weights sum to " + std::to_string(w.sum()) + ", tree is not a full partition");
  return w;
}

// mean / std (sample, T-1) of the portfolio return series, times sqrt(annualization)
inline double sharpe(const Matrix& returns, const Vector& w, double annualization = 1.0) {
  detail::require(returns.cols() == w.size(), "sharpe: weight vector length mismatch");
  detail::require(returns.rows() >= 2, "sharpe: need T >= 2");
  const Vector pr = returns * w;
  const double m = pr.mean();
  const double var = (pr.array() - m).square().sum() / static_cast<double>(pr.size() - 1);
  const double sd = std::sqrt(var);
  if (!(sd > 1e-15 * std::max(1.0, std::abs(m)))) throw NumericalError("sharpe: portfolio return has zero standard deviation");
  return m / sd * std::sqrt(annualization);
}

}  // namespace graphtopo
