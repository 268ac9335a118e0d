#pragma once

#include "core.hpp"
#include "parallel.hpp"

#include <deque>
#include <limits>
#include <vector>

namespace graphtopo {

namespace detail {

inline std::vector<std::vector<Index>> adjacency_lists(const Matrix& w, Index skip = -1) {
  const Index n = w.rows();
  std::vector<std::vector<Index>> adj(n);
  for (Index i = 0; i < n; ++i) {
    if (i == skip) continue;
    for (Index j = 0; j < n; ++j)
      if (j != skip && j != i && w(i, j) > 0.0) adj[i].push_back(j);
  }
  return adj;
}

// hop distances from s, -1 when unreachable
inline std::vector<Index> bfs(const std::vector<std::vector<Index>>& adj, Index s) {
  std::vector<Index> dist(adj.size(), -1);
  std::deque<Index> q{s};
  dist[s] = 0;
  while (!q.empty()) {
    const Index v = q.front();
    q.pop_front();
    for (Index u : adj[v])
      if (dist[u] < 0) {
        dist[u] = dist[v] + 1;
        q.push_back(u);
      }
  }
  return dist;
}

// sum of hop distances over unordered pairs, skipping vertex `skip`; +inf if some pair is unreachable
inline double total_distance(const Matrix& w, Index skip) {
  const Index n = w.rows();
  const auto adj = adjacency_lists(w, skip);
  std::vector<double> part(n, 0.0);
  parallel_for(static_cast<size_t>(n), [&](size_t s) {
    if (static_cast<Index>(s) == skip) return;
    const auto d = bfs(adj, s);
    double acc = 0.0;
    for (Index t = static_cast<Index>(s) + 1; t < n; ++t) {
      if (t == skip) continue;
      if (d[t] < 0) {
        acc = std::numeric_limits<double>::infinity();
        break;
      }
      acc += static_cast<double>(d[t]);
    }
    part[s] = acc;
  });
  double total = 0.0;
  for (double v : part) total += v;
  return total;
}

}  // namespace detail

// Brandes on the hop-count skeleton, unordered pairs.
inline Vector betweenness(const Graph& g) {
  const Index n = g.n();
  const auto adj = detail::adjacency_lists(g.w());
  std::vector<Vector> per(n);
  parallel_for(static_cast<size_t>(n), [&](size_t s) {
    Vector cb = Vector::Zero(n);
    std::vector<std::vector<Index>> pred(n);
    std::vector<double> sigma(n, 0.0), delta(n, 0.0);
    std::vector<Index> dist(n, -1), order;
    std::deque<Index> q{static_cast<Index>(s)};
    sigma[s] = 1.0;
    dist[s] = 0;
    while (!q.empty()) {
      const Index v = q.front();
      q.pop_front();
      order.push_back(v);
      for (Index u : adj[v]) {
        if (dist[u] < 0) {
          dist[u] = dist[v] + 1;
          q.push_back(u);
        }
        if (dist[u] == dist[v] + 1) {
          sigma[u] += sigma[v];
          pred[u].push_back(v);
        }
      }
    }
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      const Index w = *it;
      for (Index v : pred[w]) delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
      if (w != static_cast<Index>(s)) cb(w) += delta[w];
    }
    per[s] = std::move(cb);
  });
  Vector b = Vector::Zero(n);
  for (Index s = 0; s < n; ++s) b += per[s];
  return b / 2.0;
}

// total pairwise distance of G minus that of G without n; +inf when removal disconnects
inline Vector closeness_vitality(const Graph& g) {
  const Index n = g.n();
  const double base = detail::total_distance(g.w(), -1);
  Vector v(n);
  for (Index i = 0; i < n; ++i) {
    const double without = detail::total_distance(g.w(), i);
    v(i) = std::isinf(without) ? std::numeric_limits<double>::infinity() : base - without;
  }
  return v;
}

// phi = -(1/k) L^+ q, shifted so the minimum is 0
inline Vector fick_population(const Laplacian& l, const Vector& q, double k) {
  detail::require(k > 0.0, "fick_population: diffusivity k must be > 0");
  detail::require(q.size() == l.n(), "fick_population: flow vector length mismatch");
  if (l.n() == 0) return Vector();
  Vector phi = -(1.0 / k) * (pseudo_inverse(l.l, 1e-12) * q);
  phi.array() -= phi.minCoeff();
  return phi;
}

}  // namespace graphtopo
