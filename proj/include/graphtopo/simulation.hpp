#pragma once

#include "core.hpp"
#include "parallel.hpp"
#include "physical.hpp"
#include "random.hpp"

#include <string>
#include <vector>

namespace graphtopo {

enum class SimMode { sources = 1, dipole = 2, pinned_pair = 3, diffusion = 4, adjacency_shift = 5, bandlimited = 6 };

inline SimMode parse_sim_mode(const std::string& s) {
  if (s == "1" || s == "sources") return SimMode::sources;
  if (s == "2" || s == "dipole") return SimMode::dipole;
  if (s == "3" || s == "pinned_pair") return SimMode::pinned_pair;
  if (s == "4" || s == "diffusion") return SimMode::diffusion;
  if (s == "5" || s == "adjacency_shift") return SimMode::adjacency_shift;
  if (s == "6" || s == "bandlimited") return SimMode::bandlimited;
  throw InvalidArgument("unknown simulation mode '" + s + "'");
}

struct SimSpec {
  SimMode mode = SimMode::diffusion;
  std::uint64_t seed = 0;
  Index p = 1;
  double sigma = 1.0;
  Index reference = 0;                  // modes 1, 2
  std::vector<double> h{1.0};           // mode 4: sum_m h_m L^m (normalized L)
  int shifts = 1;                       // mode 5: K
  int spikes = 1;                       // mode 5: N_a
  std::vector<double> spike_amplitudes; // mode 5, default 1
  std::vector<Index> indices;           // mode 6: eigen indices
  std::vector<double> amplitudes;       // mode 6: fixed a_k (random N(0, sigma^2) when empty)
  LaplacianKind basis = LaplacianKind::combinatorial;  // mode 6 eigenbasis

  void validate(Index n) const {
    detail::require(p >= 1, "simulate: p must be >= 1");
    detail::require(sigma > 0.0, "simulate: sigma must be > 0");
    switch (mode) {
      case SimMode::sources:
      case SimMode::dipole:
        detail::require(reference >= 0 && reference < n, "simulate: reference vertex out of range");
        detail::require(n >= 2, "simulate: modes 1 and 2 need N >= 2");
        break;
      case SimMode::pinned_pair: detail::require(n >= 2, "simulate: mode 3 needs N >= 2"); break;
      case SimMode::diffusion: detail::require(!h.empty(), "simulate: mode 4 needs h coefficients"); break;
      case SimMode::adjacency_shift:
        detail::require(shifts >= 0, "simulate: mode 5 shifts must be >= 0");
        detail::require(spikes >= 1 && spikes <= n, "simulate: mode 5 spike count must be in [1, N]");
        detail::require(spike_amplitudes.empty() || static_cast<int>(spike_amplitudes.size()) == spikes,
                        "simulate: mode 5 needs one amplitude per spike");
        break;
      case SimMode::bandlimited:
        detail::require(!indices.empty(), "simulate: mode 6 needs eigen indices");
        for (Index k : indices) detail::require(k >= 0 && k < n, "simulate: mode 6 eigen index out of range");
        detail::require(amplitudes.empty() || amplitudes.size() == indices.size(),
                        "simulate: mode 6 needs one amplitude per index");
        break;
    }
  }
};

struct SimResult {
  Matrix x;                    // N x P
  Matrix sources;              // N x P for modes 1 and 2, empty otherwise
  std::string rng = kRngName;
};

namespace detail {

// k distinct vertices, uniformly
inline std::vector<Index> distinct(Rng& rng, Index n, Index k) {
  std::vector<Index> all(n);
  for (Index i = 0; i < n; ++i) all[i] = i;
  for (Index i = 0; i < k; ++i) {
    const Index j = i + static_cast<Index>(rng.below(static_cast<std::uint64_t>(n - i)));
    std::swap(all[i], all[j]);
  }
  all.resize(k);
  return all;
}

}  // namespace detail

// Snapshot p draws only from substream (seed, p), so the output is independent of threading.
inline SimResult simulate(const Graph& g, const SimSpec& spec) {
  const Index n = g.n();
  detail::require(n >= 1, "simulate: empty graph");
  spec.validate(n);
  const bool needs_conn = spec.mode == SimMode::sources || spec.mode == SimMode::dipole || spec.mode == SimMode::pinned_pair;
  if (needs_conn && !is_connected(g)) throw InvalidArgument("simulate: modes 1-3 need a connected graph");
  SimResult out;
  out.x = Matrix::Zero(n, spec.p);
  const bool with_sources = spec.mode == SimMode::sources || spec.mode == SimMode::dipole;
  if (with_sources) out.sources = Matrix::Zero(n, spec.p);

  const Laplacian lc = laplacian(g);
  Matrix op;  // per-mode fixed operator
  std::vector<Index> rest;
  Eigen::LDLT<Matrix> red;
  Matrix basis;
  if (with_sources) {
    rest = complement(n, {spec.reference});
    red.compute(take(lc.l, rest, rest));
  } else if (spec.mode == SimMode::diffusion) {
    const Matrix ln = laplacian(g, LaplacianKind::normalized, false).l;
    op = Matrix::Zero(n, n);
    Matrix pw = Matrix::Identity(n, n);
    for (size_t m = 0; m < spec.h.size(); ++m) {
      if (m) pw = pw * ln;
      op += spec.h[m] * pw;
    }
  } else if (spec.mode == SimMode::adjacency_shift) {
    op = Matrix::Identity(n, n);
    for (int k = 0; k < spec.shifts; ++k) op = g.w() * op;
  } else if (spec.mode == SimMode::bandlimited) {
    basis = eig_sym(laplacian(g, spec.basis, false).l).vectors;
  }

  parallel_for(static_cast<size_t>(spec.p), [&](size_t p) {
    Rng rng = Rng::substream(spec.seed, p);
    Vector x = Vector::Zero(n);
    switch (spec.mode) {
      case SimMode::sources:
      case SimMode::dipole: {
        Vector e = Vector::Zero(n);
        if (spec.mode == SimMode::sources) {
          const Index c = static_cast<Index>(rng.below(static_cast<std::uint64_t>(n)));
          double s = 0.0;
          for (Index i = 0; i < n; ++i)
            if (i != c) {
              e(i) = spec.sigma * rng.normal();
              s += e(i);
            }
          e(c) = -s;
        } else {
          const auto ab = detail::distinct(rng, n, 2);
          const double a = spec.sigma * rng.normal();
          e(ab[0]) = a;
          e(ab[1]) = -a;
        }
        const Vector xr = red.solve(take(e, rest));
        for (size_t k = 0; k < rest.size(); ++k) x(rest[k]) = xr(k);
        out.sources.col(p) = e;
        break;
      }
      case SimMode::pinned_pair: {
        const auto ab = detail::distinct(rng, n, 2);
        BoundaryCondition bc;
        bc[ab[0]] = spec.sigma * rng.normal();
        bc[ab[1]] = spec.sigma * rng.normal();
        x = circuit_solve(lc, bc);
        break;
      }
      case SimMode::diffusion: x = op * (spec.sigma * rng.normal_vector(n)); break;
      case SimMode::adjacency_shift: {
        const auto pos = detail::distinct(rng, n, spec.spikes);
        Vector d = Vector::Zero(n);
        for (int i = 0; i < spec.spikes; ++i) d(pos[i]) += spec.spike_amplitudes.empty() ? 1.0 : spec.spike_amplitudes[i];
        x = op * d;
        break;
      }
      case SimMode::bandlimited:
        for (size_t i = 0; i < spec.indices.size(); ++i) {
          const double a = spec.amplitudes.empty() ? spec.sigma * rng.normal() : spec.amplitudes[i];
          x += a * basis.col(spec.indices[i]);
        }
        break;
    }
    out.x.col(p) = x;
  });
  return out;
}

}  // namespace graphtopo
