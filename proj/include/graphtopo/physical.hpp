#pragma once

#include "core.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <vector>

namespace graphtopo {

// vertex -> pinned value
using BoundaryCondition = std::map<Index, double>;

namespace detail {

inline void check_bc(const BoundaryCondition& bc, Index n) {
  for (const auto& [v, x] : bc) {
    require(v >= 0 && v < n, "boundary vertex " + std::to_string(v) + " out of range");
    require(std::isfinite(x), "boundary value at vertex " + std::to_string(v) + " is not finite");
  }
}

}  // namespace detail

// Solves (L x)_n = i_n on free vertices with x pinned on bc.
inline Vector circuit_solve(const Laplacian& l, const BoundaryCondition& bc,
                            const std::optional<SourceVector>& sources = std::nullopt) {
  const Index n = l.n();
  detail::check_bc(bc, n);
  Vector i = sources ? sources->i : Vector::Zero(n);
  detail::require(i.size() == n, "circuit_solve: source vector has wrong length");
  Vector x = Vector::Zero(n);
  std::vector<Index> fixed, free;
  for (const auto& [v, val] : bc) {
    fixed.push_back(v);
    x(v) = val;
  }
  free = complement(n, fixed);
  if (free.empty()) return x;
  if (fixed.empty()) throw NumericalError("circuit_solve: no fixed vertex, the system is singular (floating potential)");
  // every free component must touch a fixed vertex
  {
    Matrix adj = -l.l;
    adj.diagonal().setZero();
    adj = adj.cwiseAbs();
    const auto lab = components(adj);
    std::vector<char> anchored(n, 0);
    for (Index v : fixed) anchored[lab[v]] = 1;
    for (Index v : free)
      if (!anchored[lab[v]])
        throw NumericalError("circuit_solve: vertex " + std::to_string(v) + " lies in a component with no fixed vertex");
  }
  const Matrix lff = take(l.l, free, free);
  const Matrix lfb = take(l.l, free, fixed);
  const Vector rhs = take(i, free) - lfb * take(x, fixed);
  Eigen::LDLT<Matrix> ldlt(lff);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
    throw NumericalError("circuit_solve: reduced system is singular");
  const Vector xf = ldlt.solve(rhs);
  if (!xf.allFinite()) throw NumericalError("circuit_solve: reduced system is singular");
  for (size_t k = 0; k < free.size(); ++k) x(free[k]) = xf(k);
  return x;
}

struct PagerankConfig {
  bool damped = false;
  double teleport = 0.15;
  double scale = 0.85;
  double tol = 1e-6;
  int max_iter = 1000;
  int accel_depth = 5;  // Anderson extrapolation depth; 0 = plain power iteration
};

struct PagerankResult {
  Vector x;
  int iterations = 0;
  bool converged = false;
};

// W_N = W^T with column j divided by out-degree of j.
inline Matrix pagerank_operator(const DirectedGraph& g) {
  const Vector d = g.out_degrees();
  for (Index j = 0; j < g.n(); ++j)
    if (d(j) <= 0.0) throw InvalidArgument("pagerank: vertex " + std::to_string(j) + " has no outgoing link (dangling)");
  return g.w().transpose() * d.cwiseInverse().asDiagonal();
}

inline PagerankResult pagerank(const DirectedGraph& g, const PagerankConfig& cfg = {}) {
  detail::require(cfg.tol > 0.0 && cfg.max_iter >= 1 && cfg.accel_depth >= 0, "pagerank: bad configuration");
  const Index n = g.n();
  PagerankResult out;
  if (n == 0) {
    out.converged = true;
    return out;
  }
  const Matrix wn = pagerank_operator(g);
  auto step = [&](const Vector& v) -> Vector {
    if (!cfg.damped) return wn * v;
    return (cfg.scale * (wn * v)).array() + cfg.teleport;
  };
  Vector x = Vector::Ones(n);
  std::vector<Vector> gs, fs;
  for (int k = 1; k <= cfg.max_iter; ++k) {
    const Vector gx = step(x);
    const Vector f = gx - x;
    out.iterations = k;
    if (f.lpNorm<Eigen::Infinity>() < cfg.tol) {
      x = gx;
      out.converged = true;
      break;
    }
    if (cfg.accel_depth == 0) {
      x = gx;
      continue;
    }
    gs.push_back(gx);
    fs.push_back(f);
    if (static_cast<int>(gs.size()) > cfg.accel_depth + 1) {
      gs.erase(gs.begin());
      fs.erase(fs.begin());
    }
    const Index m = static_cast<Index>(fs.size()) - 1;
    if (m == 0) {
      x = gx;
      continue;
    }
    Matrix df(n, m), dg(n, m);
    for (Index c = 0; c < m; ++c) {
      df.col(c) = fs[c + 1] - fs[c];
      dg.col(c) = gs[c + 1] - gs[c];
    }
    const Vector gamma = df.colPivHouseholderQr().solve(f);
    Vector next = gx - dg * gamma;
    if (!next.allFinite()) {
      next = gx;
      gs.clear();
      fs.clear();
    }
    x = std::move(next);
  }
  if (!cfg.damped) x /= x.mean();
  out.x = std::move(x);
  return out;
}

inline Vector absorbing_probabilities(const Graph& g, const BoundaryCondition& bc) {
  return circuit_solve(laplacian(g), bc);
}

// Expected steps to reach target; h(target) = 0.
inline Vector hitting_times(const Graph& g, Index target) {
  const Index n = g.n();
  detail::require(target >= 0 && target < n, "hitting_times: target out of range");
  if (!is_connected(g)) throw NumericalError("hitting_times: graph is disconnected, hitting times are infinite");
  Vector h = Vector::Zero(n);
  if (n == 1) return h;
  const auto rest = complement(n, {target});
  const Laplacian l = laplacian(g);
  const Vector rhs = take(g.degrees(), rest);
  const Vector hr = take(l.l, rest, rest).ldlt().solve(rhs);
  for (size_t k = 0; k < rest.size(); ++k) h(rest[k]) = hr(k);
  return h;
}

inline double effective_resistance(const Graph& g, Index m, Index n) {
  detail::require(m >= 0 && n >= 0 && m < g.n() && n < g.n(), "effective_resistance: vertex out of range");
  if (m == n) return 0.0;
  if (!is_connected(g)) throw NumericalError("effective_resistance: graph is disconnected");
  const Matrix lp = pseudo_inverse(laplacian(g).l, 1e-12);
  return lp(m, m) + lp(n, n) - 2.0 * lp(m, n);
}

inline double commute_time(const Graph& g, Index m, Index n) {
  return g.degrees().sum() * effective_resistance(g, m, n);
}

struct LabelPropResult {
  Vector x;
  int iterations = 0;
  bool converged = false;
};

// x <- S x with S = D^{-1} W, labeled entries re-pinned after each step.
inline LabelPropResult label_propagation(const Graph& g, const BoundaryCondition& labels, int max_iter = 100000,
                                         double tol = 1e-13) {
  const Index n = g.n();
  detail::check_bc(labels, n);
  detail::require(!labels.empty(), "label_propagation: need at least one label");
  {
    const auto lab = components(g.w());
    std::vector<char> has(n, 0);
    for (const auto& [v, x] : labels) has[lab[v]] = 1;
    for (Index v = 0; v < n; ++v)
      if (!has[lab[v]]) throw InvalidArgument("label_propagation: vertex " + std::to_string(v) + " is in an unlabeled component");
  }
  double mean = 0.0;
  for (const auto& [v, x] : labels) mean += x;
  mean /= static_cast<double>(labels.size());
  LabelPropResult out;
  Vector x = Vector::Constant(n, mean);
  for (const auto& [v, val] : labels) x(v) = val;
  if (static_cast<Index>(labels.size()) == n) {
    out.x = x;
    out.converged = true;
    return out;
  }
  const Matrix s = g.degrees().cwiseInverse().asDiagonal() * g.w();
  for (int k = 1; k <= max_iter; ++k) {
    Vector next = s * x;
    for (const auto& [v, val] : labels) next(v) = val;
    const double change = (next - x).lpNorm<Eigen::Infinity>();
    x.swap(next);
    out.iterations = k;
    if (change < tol) {
      out.converged = true;
      break;
    }
  }
  out.x = std::move(x);
  return out;
}

// Closed form x_U = (I - S_UU)^{-1} S_UL x_L.
inline Vector label_propagation_closed_form(const Graph& g, const BoundaryCondition& labels) {
  const Index n = g.n();
  detail::check_bc(labels, n);
  std::vector<Index> lab;
  Vector x = Vector::Zero(n);
  for (const auto& [v, val] : labels) {
    lab.push_back(v);
    x(v) = val;
  }
  const auto un = complement(n, lab);
  if (un.empty()) return x;
  const Matrix s = g.degrees().cwiseInverse().asDiagonal() * g.w();
  Matrix a = -take(s, un, un);
  a.diagonal().array() += 1.0;
  const Vector xu = a.fullPivLu().solve(take(s, un, lab) * take(x, lab));
  for (size_t k = 0; k < un.size(); ++k) x(un[k]) = xu(k);
  return x;
}

// Denoising with at most k sources; output is referenced so x(reference) = 0.
inline Vector sparse_source_denoise(const Laplacian& l, const Vector& y, Index k, Index reference) {
  const Index n = l.n();
  detail::require(y.size() == n, "sparse_source_denoise: signal length mismatch");
  detail::require(reference >= 0 && reference < n, "sparse_source_denoise: reference out of range");
  detail::require(k >= 1, "sparse_source_denoise: k must be >= 1");
  detail::require(k < n, "sparse_source_denoise: k must be < N");
  const Vector yr = y.array() - y(reference);
  const auto rest = complement(n, {reference});
  const Matrix lred = take(l.l, rest, rest);
  Eigen::FullPivLU<Matrix> lu(lred);
  if (!lu.isInvertible()) throw NumericalError("sparse_source_denoise: reduced Laplacian is singular (disconnected graph?)");
  const Matrix linv = lu.inverse();
  const Vector s = take(Vector(l.l * yr), rest);
  std::vector<Index> order(rest.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return std::abs(s(a)) > std::abs(s(b)); });
  order.resize(k);
  std::sort(order.begin(), order.end());
  Matrix lk(rest.size(), k);
  for (Index c = 0; c < k; ++c) lk.col(c) = linv.col(order[c]);
  const Vector yred = take(yr, rest);
  const Vector jk = pseudo_inverse(lk, 1e-12) * yred;
  Vector j = Vector::Zero(rest.size());
  for (Index c = 0; c < k; ++c) j(order[c]) = jk(c);
  const Vector xr = linv * j;
  Vector x = Vector::Zero(n);
  for (size_t c = 0; c < rest.size(); ++c) x(rest[c]) = xr(c);
  return x;
}

enum class WalkKind { vertex_centric, edge_centric };

// vertex-centric: sqrt(d_n / N); edge-centric: 1/sqrt(N). normalize rescales to unit norm.
inline Vector walk_steady_state(const Graph& g, WalkKind kind, bool normalize = false) {
  const Index n = g.n();
  detail::require(n >= 1, "walk_steady_state: empty graph");
  if (!is_connected(g)) throw InvalidArgument("walk_steady_state: graph is disconnected");
  Vector x = kind == WalkKind::edge_centric ? Vector::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)))
                                            : Vector((g.degrees() / static_cast<double>(n)).cwiseSqrt());
  if (normalize) x.normalize();
  return x;
}

}  // namespace graphtopo
