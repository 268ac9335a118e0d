#pragma once

// Golden and property checks run by the acceptance binary and `graphtopo verify`.

#include "graphtopo.hpp"
#include "oracles.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

namespace graphtopo::verify {

struct CheckResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

namespace detail {

inline std::string num(double v, int prec = 6) {
  std::ostringstream s;
  s.precision(prec);
  s << v;
  return s.str();
}

inline double max_abs(const Matrix& a, const Matrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

// Erdos-Renyi style graph, retried until connected.
inline Graph random_connected(Rng& rng, Index n, double p, double lo, double hi) {
  for (;;) {
    Matrix w = Matrix::Zero(n, n);
    for (Index i = 0; i < n; ++i)
      for (Index j = i + 1; j < n; ++j)
        if (rng.uniform() < p) w(i, j) = w(j, i) = rng.uniform(lo, hi);
    Graph g(w);
    if (is_connected(g)) return g;
  }
}

// Two planted blocks: dense inside, sparse across.
inline Graph planted_two_block(Rng& rng, Index n, double p_in, double p_out) {
  for (;;) {
    const Index n1 = n / 2;
    Matrix w = Matrix::Zero(n, n);
    for (Index i = 0; i < n; ++i)
      for (Index j = i + 1; j < n; ++j) {
        const bool same = (i < n1) == (j < n1);
        if (rng.uniform() < (same ? p_in : p_out)) w(i, j) = w(j, i) = rng.uniform(0.5, 1.0);
      }
    Graph g(w);
    if (is_connected(g)) return g;
  }
}

inline Matrix random_spd(Rng& rng, Index n, double lo, double hi) {
  Eigen::HouseholderQR<Matrix> qr(rng.normal_matrix(n, n));
  const Matrix q = qr.householderQ();
  Vector lam(n);
  for (Index i = 0; i < n; ++i) lam(i) = rng.uniform(lo, hi);
  Matrix r = q * lam.asDiagonal() * q.transpose();
  return 0.5 * (r + r.transpose());
}

}  // namespace detail

inline CheckResult precision_example() {
  CheckResult c{1, "precision matrix of the 4-step chain", false, {}, 0.0};
  const Matrix r = datasets::chain4_correlation();
  const PrecisionResult p = precision_matrix(r);
  const Matrix qn = normalize_precision(p.q);
  // timed after one warm call
  const auto t0 = std::chrono::steady_clock::now();
  const PrecisionResult p2 = precision_matrix(r);
  const Matrix qn2 = normalize_precision(p2.q);
  const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  const double e1 = detail::max_abs(p.q, datasets::chain4_precision());
  const double e2 = detail::max_abs(qn2, datasets::chain4_normalized_precision());
  c.pass = !p.rank_deficient && e1 < 1e-10 && e2 < 1e-12 && ms < 1.0 && detail::max_abs(qn, qn2) == 0.0;
  c.detail = "inverse err " + detail::num(e1) + ", normalized err " + detail::num(e2) + ", " + detail::num(ms, 3) + " ms";
  return c;
}

inline CheckResult regression_example() {
  CheckResult c{2, "regression coefficients and geometric symmetrisation", false, {}, 0.0};
  const Matrix r = datasets::chain4_correlation();
  const Index p = 4;
  const Matrix x = std::sqrt(static_cast<double>(p)) * Matrix(r.llt().matrixL());
  RegressionConfig cfg;
  cfg.rho = 0.0;
  cfg.max_iter = 200000;
  cfg.tol = 1e-13;
  const RegressionResult b = neighborhood_regression(x, cfg);
  Vector row0(3);
  row0 << b.beta(0, 1), b.beta(0, 2), b.beta(0, 3);
  Vector want(3);
  want << 0.5, 0.0, 0.0;
  const double e0 = (row0 - want).cwiseAbs().maxCoeff();
  const double eb = detail::max_abs(b.beta, datasets::chain4_regression());
  const double ew = detail::max_abs(symmetrize_geometric(datasets::chain4_regression()).w(), datasets::chain4_weights());
  const double ewl = detail::max_abs(symmetrize_geometric(b.beta, true).w(), datasets::chain4_weights());
  c.pass = e0 < 1e-6 && ew < 1e-6 && ewl < 1e-6;
  c.detail = "row0 err " + detail::num(e0) + ", beta err " + detail::num(eb) + ", W err " + detail::num(ew) +
             ", W(learned) err " + detail::num(ewl);
  return c;
}

inline CheckResult pagerank_example() {
  CheckResult c{3, "PageRank of the 8-page graph", false, {}, 0.0};
  PagerankConfig cfg;
  cfg.tol = 1e-6;
  const PagerankResult r = pagerank(datasets::web8(), cfg);
  const double e = (r.x - datasets::web8_rank()).cwiseAbs().maxCoeff();
  PagerankConfig plain = cfg;
  plain.accel_depth = 0;
  const PagerankResult rp = pagerank(datasets::web8(), plain);
  c.pass = r.converged && r.iterations <= 20 && e <= 0.01;
  c.detail = "max err " + detail::num(e) + ", " + std::to_string(r.iterations) + " iterations (plain power iteration: " +
             std::to_string(rp.iterations) + ")";
  return c;
}

inline CheckResult absorbing_example() {
  CheckResult c{4, "absorbing probabilities on the social graph", false, {}, 0.0};
  const Vector x = absorbing_probabilities(datasets::social8(), {{4, 1.0}, {3, 0.0}});
  const double e = (x - datasets::social8_absorb()).cwiseAbs().maxCoeff();
  c.pass = e < 1e-3;
  c.detail = "max err " + detail::num(e);
  return c;
}

inline CheckResult hitting_example() {
  CheckResult c{5, "hitting and commute times", false, {}, 0.0};
  const Graph g = datasets::weighted8();
  const Vector h = hitting_times(g, 3);
  const double eh = (h - datasets::weighted8_hitting3()).cwiseAbs().maxCoeff();
  const double reff = effective_resistance(g, 7, 0);
  const double ct = commute_time(g, 7, 0);
  const double h07 = hitting_times(g, 7)(0), h70 = hitting_times(g, 0)(7);
  const double cons = std::abs(ct - h07 - h70);
  c.pass = eh < 1e-3 && std::abs(reff - 4.0745) < 1e-3 && std::abs(ct - 30.3960) < 1e-3 && cons < 1e-6;
  c.detail = "h err " + detail::num(eh) + ", R_eff " + detail::num(reff, 8) + ", CT " + detail::num(ct, 8) +
             ", |CT-h-h| " + detail::num(cons);
  return c;
}

struct LassoTrial {
  bool support_ok = false;
  bool strict_support_ok = false;
  double coef_err = 0.0;
};

inline LassoTrial lasso_recovery_trial(std::uint64_t seed) {
  const Index n = 60, m = 40;
  Rng rng(seed);
  const Matrix a = rng.normal_matrix(m, n) / std::sqrt(static_cast<double>(m));
  Vector x = Vector::Zero(n);
  x(5) = 1.0;
  x(12) = 0.5;
  x(31) = 0.9;
  x(45) = -0.75;
  const Vector y = a * x;
  LassoConfig cfg;
  cfg.rho = 0.01;
  cfg.max_iter = 1000;
  cfg.tol = 1e-12;
  const LassoResult r = lasso_ista(a, y, cfg);
  LassoTrial t;
  // support: entries above the shrinkage level rho
  t.support_ok = t.strict_support_ok = true;
  for (Index i = 0; i < n; ++i) {
    t.support_ok = t.support_ok && ((std::abs(r.x(i)) > cfg.rho) == (x(i) != 0.0));
    t.strict_support_ok = t.strict_support_ok && ((r.x(i) != 0.0) == (x(i) != 0.0));
  }
  t.coef_err = (r.x - x).cwiseAbs().maxCoeff();
  return t;
}

inline CheckResult lasso_recovery() {
  CheckResult c{6, "sparse recovery with ISTA (N=60, M=40)", false, {}, 0.0};
  int ok = 0, strict = 0;
  double worst = 0.0;
  std::string miss;
  for (std::uint64_t s = 1; s <= 10; ++s) {
    const LassoTrial t = lasso_recovery_trial(s);
    if (t.strict_support_ok && t.coef_err < 0.05) ++strict;
    if (t.support_ok && t.coef_err < 0.05) ++ok;
    else miss += " " + std::to_string(s);
    worst = std::max(worst, t.coef_err);
  }
  c.pass = ok >= 9;
  c.detail = std::to_string(ok) + "/10 seeds exact (" + std::to_string(strict) + "/10 with no nonzero off-support entry), worst coef err " + detail::num(worst) + (miss.empty() ? "" : ", failed seeds:" + miss);
  return c;
}

inline CheckResult glasso_inverse() {
  CheckResult c{7, "graphical lasso with rho=0 inverts R", false, {}, 0.0};
  Rng rng(7);
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    const Matrix r = detail::random_spd(rng, 10, 0.5, 2.0);
    GlassoConfig cfg;
    cfg.rho = 0.0;
    const GlassoResult g = glasso(r, cfg);
    const Matrix e = g.q * r - Matrix::Identity(10, 10);
    worst = std::max(worst, e.cwiseAbs().rowwise().sum().maxCoeff());
  }
  c.pass = worst < 1e-3;
  c.detail = "worst ||QR - I||_inf " + detail::num(worst);
  return c;
}

struct RecoveryReport {
  double polyfit_db = 0.0, regression_db = 0.0, glasso_db = 0.0, zero_db = 0.0;
};

inline RecoveryReport topology_recovery_run(std::uint64_t seed = 2024) {
  const Graph g = datasets::weighted8();
  SimSpec spec;
  spec.mode = SimMode::diffusion;
  spec.h = {0.3, 0.2, 0.5};
  spec.p = 10000;
  spec.seed = seed;
  const Matrix x = simulate(g, spec).x;
  const Matrix truth = weights_of(laplacian(g, LaplacianKind::normalized).l).cwiseAbs();
  const Matrix r = correlation_matrix(x);
  RecoveryReport rep;
  rep.zero_db = mse_db(Matrix::Zero(8, 8), truth);
  PolyFitConfig pc;
  pc.m = 2;
  const PolyFitResult pf = polynomial_fit_eigenvalues(r, pc);
  rep.polyfit_db = mse_db(weights_of(pf.l.l).cwiseAbs(), truth);
  // lasso rows on data scaled so the Gram matrix is the correlation matrix
  RegressionConfig rc;
  rc.rho = 0.2;
  const RegressionResult b = neighborhood_regression(x / std::sqrt(static_cast<double>(x.cols())), rc);
  // diffusion data gives negative coefficients, so compare magnitudes as with glasso
  rep.regression_db = mse_db(symmetrize_geometric(b.beta.cwiseAbs()).w(), truth);
  GlassoConfig gc;
  gc.rho = 0.3;
  const GlassoResult q = glasso(r, gc);
  rep.glasso_db = mse_db(weights_of(normalize_precision(q.q)).cwiseAbs(), truth);
  return rep;
}

inline CheckResult topology_recovery() {
  CheckResult c{8, "topology recovery from diffusion data (N=8)", false, {}, 0.0};
  const RecoveryReport r = topology_recovery_run();
  c.pass = r.polyfit_db <= -20.0 && r.regression_db <= -8.0 && r.glasso_db <= -8.0;
  c.detail = "polyfit " + detail::num(r.polyfit_db, 4) + " dB, regression " + detail::num(r.regression_db, 4) +
             " dB, glasso " + detail::num(r.glasso_db, 4) + " dB (all-zero estimate " + detail::num(r.zero_db, 4) + " dB)";
  return c;
}

inline int spectral_cut_hits(bool planted, int count, bool* never_below, double* rq_err) {
  int hits = 0;
  for (int t = 0; t < count; ++t) {
    Rng rng = Rng::substream(planted ? 909 : 910, t);
    const Index n = 6 + static_cast<Index>(rng.below(7));
    const Graph g = planted ? detail::planted_two_block(rng, n, 0.8, 0.1) : detail::random_connected(rng, n, 0.5, 0.0, 1.0);
    const BisectResult b = spectral_bisect(g, CutKind::normalized);
    Bipartition best;
    const double opt = oracle::brute_force_min_cut(g, CutKind::normalized, &best);
    if (b.value < opt - 1e-12) *never_below = false;
    if (b.value <= opt * (1.0 + 1e-9)) ++hits;
    const Matrix l = laplacian(g).l;
    const Vector d = g.degrees();
    for (const Bipartition* p : std::initializer_list<const Bipartition*>{&b.part, &best}) {
      const Vector xn = cut_indicator(g, *p, CutKind::normalized);
      const Vector xv = cut_indicator(g, *p, CutKind::volume);
      *rq_err = std::max(*rq_err, std::abs(xn.dot(l * xn) / xn.squaredNorm() - cut_value(g, *p, CutKind::normalized)));
      *rq_err = std::max(*rq_err, std::abs(xv.dot(l * xv) / xv.dot(d.asDiagonal() * xv) - cut_value(g, *p, CutKind::volume)));
    }
  }
  return hits;
}

inline CheckResult spectral_cut() {
  CheckResult c{9, "spectral bisection versus brute-force optimum", false, {}, 0.0};
  bool never_below = true;
  double rq = 0.0;
  const int hits = spectral_cut_hits(true, 100, &never_below, &rq);
  bool nb2 = true;
  double rq2 = 0.0;
  const int er_hits = spectral_cut_hits(false, 100, &nb2, &rq2);
  c.pass = hits >= 70 && never_below && nb2 && rq < 1e-10 && rq2 < 1e-10;
  c.detail = std::to_string(hits) + "/100 optimal on planted two-block graphs (" + std::to_string(er_hits) +
             "/100 on Erdos-Renyi), Rayleigh identity err " + detail::num(std::max(rq, rq2));
  return c;
}

// tree with leaf depths 2, 2, 2, 3, 3
inline CutTree five_leaf_tree() {
  CutTree t = CutTree::root(10);
  auto [a, b] = t.split(0, {0, 1, 2, 3}, {4, 5, 6, 7, 8, 9});
  t.split(a, {0, 1}, {2, 3});
  auto [b1, b2] = t.split(b, {4, 5}, {6, 7, 8, 9});
  (void)b1;
  t.split(b2, {6, 7}, {8, 9});
  return t;
}

inline CheckResult allocation_invariants() {
  CheckResult c{10, "allocation weights sum to one", false, {}, 0.0};
  double worst = 0.0;
  int trees = 0;
  for (int t = 0; t < 1000; ++t) {
    Rng rng = Rng::substream(1010, t);
    const Index n = 2 + static_cast<Index>(rng.below(63));
    const Graph g = detail::random_connected(rng, n, std::min(1.0, 4.0 / static_cast<double>(n)), 0.1, 1.0);
    const int k = static_cast<int>(rng.below(static_cast<std::uint64_t>(std::min<Index>(8, n - 1)) + 1));
    const CutTree tree = repeated_cuts(g, k);
    for (AllocScheme s : {AllocScheme::as1, AllocScheme::as2}) {
      try {
        worst = std::max(worst, std::abs(allocate(tree, s).sum() - 1.0));
      } catch (const NumericalError&) {
        worst = 1.0;
      }
    }
    ++trees;
  }
  const CutTree fig = five_leaf_tree();
  std::vector<double> leaf_w;
  const Vector w = allocate(fig, AllocScheme::as1);
  for (int leaf : fig.leaves()) {
    double s = 0.0;
    for (Index i : fig.nodes[leaf].vertices) s += w(i);
    leaf_w.push_back(s);
  }
  std::sort(leaf_w.begin(), leaf_w.end(), std::greater<double>());
  const std::vector<double> want{0.25, 0.25, 0.25, 0.125, 0.125};
  bool fig_ok = leaf_w.size() == want.size();
  for (size_t i = 0; fig_ok && i < want.size(); ++i) fig_ok = std::abs(leaf_w[i] - want[i]) < 1e-15;
  c.pass = worst < 1e-12 && fig_ok;
  c.detail = std::to_string(trees) + " trees, worst |sum - 1| " + detail::num(worst) + ", five-leaf tree " + (fig_ok ? "ok" : "mismatch");
  return c;
}

inline CheckResult fick_round_trip() {
  CheckResult c{11, "Fick population round trip", false, {}, 0.0};
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    Rng rng = Rng::substream(1111, t);
    const Index n = 3 + static_cast<Index>(rng.below(28));
    const Graph g = detail::random_connected(rng, n, 0.3, 0.1, 2.0);
    const Vector phi = rng.normal_vector(n);
    const double k = rng.uniform(0.2, 3.0);
    const Laplacian l = laplacian(g);
    const Vector q = -k * (l.l * phi);
    const Vector est = fick_population(l, q, k);
    worst = std::max(worst, (est - (phi.array() - phi.minCoeff()).matrix()).cwiseAbs().maxCoeff());
  }
  c.pass = worst < 1e-8;
  c.detail = "worst err " + detail::num(worst);
  return c;
}

inline CheckResult lattice_spectra() {
  CheckResult c{12, "lattice spectra", false, {}, 0.0};
  double worst = 0.0, path = 0.0;
  for (const auto& dims : std::vector<std::vector<Index>>{{3, 4}, {2, 3, 2}}) {
    const Lattice lat{dims};
    const Vector a = separable_gdft(lat).values;
    const Vector b = eig_sym(kron_sum_adjacency(lat).w()).values;
    worst = std::max(worst, (a - b).cwiseAbs().maxCoeff());
    for (Index i : dims) path = std::max(path, (eig_sym(path_adjacency(i).w()).values - path_adjacency_spectrum(i)).cwiseAbs().maxCoeff());
  }
  c.pass = worst < 1e-9 && path < 1e-10;
  c.detail = "GDFT vs dense err " + detail::num(worst) + ", path spectrum err " + detail::num(path);
  return c;
}

inline CheckResult property_suite() {
  CheckResult c{13, "property suites", false, {}, 0.0};
  std::vector<std::string> fails;
  Rng rng(1313);
  // Laplacian row sums and PSD floor
  double rows = 0.0, floor = 0.0;
  for (int t = 0; t < 200; ++t) {
    const Index n = 2 + static_cast<Index>(rng.below(29));
    const Graph g = detail::random_connected(rng, n, 0.3, 0.0, 3.0);
    const Laplacian l = laplacian(g);
    rows = std::max(rows, l.l.rowwise().sum().cwiseAbs().maxCoeff());
    floor = std::min(floor, eig_sym(l.l).values.minCoeff());
    floor = std::min(floor, eig_sym(laplacian(g, LaplacianKind::normalized).l).values.minCoeff());
  }
  if (rows >= 1e-12) fails.push_back("row sums " + detail::num(rows));
  if (floor < -1e-10) fails.push_back("PSD floor " + detail::num(floor));
  // soft-threshold contraction
  for (int t = 0; t < 100000; ++t) {
    const double a = rng.normal(0, 3), b = rng.normal(0, 3), th = rng.uniform(0, 2);
    // one rounding of slack per subtraction
    const double slack = 4.0 * std::numeric_limits<double>::epsilon() * (std::abs(a) + std::abs(b) + th);
    if (std::abs(soft_threshold(a, th) - soft_threshold(b, th)) > std::abs(a - b) + slack) {
      fails.push_back("soft-threshold contraction");
      break;
    }
  }
  // ISTA objective monotone
  try {
    for (int t = 0; t < 50; ++t) {
      const Index m = 5 + static_cast<Index>(rng.below(30)), n = 5 + static_cast<Index>(rng.below(30));
      LassoConfig cfg;
      cfg.rho = rng.uniform(0.0, 1.0);
      cfg.max_iter = 500;
      cfg.check_monotone = true;
      lasso_ista(rng.normal_matrix(m, n), rng.normal_vector(m), cfg);
    }
  } catch (const NumericalError& e) {
    fails.push_back(e.what());
  }
  // hitting times vs Monte Carlo, 10^6 walks per start vertex
  double worst_sigma = 0.0;
  for (int t = 0; t < 2; ++t) {
    const Index n = 5 + t;
    const Graph g = detail::random_connected(rng, n, 0.6, 0.2, 1.0);
    const Vector h = hitting_times(g, 0);
    for (Index s = 1; s < n; ++s) {
      const auto mc = oracle::mc_hitting_time(g, s, 0, 1000000, 1300 + t);
      worst_sigma = std::max(worst_sigma, std::abs(mc.mean - h(s)) / mc.stderr_);
    }
  }
  if (worst_sigma > 3.0) fails.push_back("hitting-time Monte Carlo " + detail::num(worst_sigma) + " sigma");
  // label propagation fixed point
  double lp = 0.0;
  for (int t = 0; t < 20; ++t) {
    const Graph g = detail::random_connected(rng, 10, 0.4, 0.1, 1.0);
    BoundaryCondition lab{{0, 0.0}, {4, 1.0}, {7, rng.uniform()}};
    const LabelPropResult r = label_propagation(g, lab);
    lp = std::max(lp, (r.x - label_propagation_closed_form(g, lab)).cwiseAbs().maxCoeff());
  }
  if (lp > 1e-8) fails.push_back("label propagation " + detail::num(lp));
  c.pass = fails.empty();
  c.detail = "row sums " + detail::num(rows) + ", PSD floor " + detail::num(floor) + ", MC worst " + detail::num(worst_sigma, 3) +
             " sigma, label-prop err " + detail::num(lp);
  for (const auto& f : fails) c.detail += "; FAIL " + f;
  return c;
}

inline std::vector<std::function<CheckResult()>> checks() {
  return {precision_example, regression_example, pagerank_example, absorbing_example, hitting_example,
          lasso_recovery,    glasso_inverse,     topology_recovery, spectral_cut,      allocation_invariants,
          fick_round_trip,   lattice_spectra,    property_suite};
}

// runtime budgets in seconds
inline double budget(int id) {
  switch (id) {
    case 6: return 5.0;
    case 8: return 30.0;
    case 13: return 120.0;
    default: return 0.0;
  }
}

inline std::vector<CheckResult> run_all(const std::function<void(const CheckResult&)>& report = {}) {
  std::vector<CheckResult> out;
  for (const auto& f : checks()) {
    const auto t0 = std::chrono::steady_clock::now();
    CheckResult r;
    try {
      r = f();
    } catch (const std::exception& e) {
      r.pass = false;
      r.detail = std::string("exception: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (r.id == 0) r.id = static_cast<int>(out.size()) + 1;
    const double b = budget(r.id);
    if (b > 0.0 && r.seconds > b) {
      r.pass = false;
      r.detail += "; over time budget " + detail::num(b) + " s";
    }
    if (report) report(r);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace graphtopo::verify
