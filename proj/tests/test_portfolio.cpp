#include <graphtopo/graphtopo.hpp>
#include <graphtopo/oracles.hpp>
#include <graphtopo/verify.hpp>

#include <gtest/gtest.h>

#include <set>

using namespace graphtopo;

namespace {

Graph barbell() {
  std::vector<std::tuple<Index, Index, double>> e;
  for (Index a = 0; a < 4; ++a)
    for (Index b = a + 1; b < 4; ++b) {
      e.emplace_back(a, b, 1.0);
      e.emplace_back(a + 4, b + 4, 1.0);
    }
  e.emplace_back(3, 4, 1.0);
  return Graph::from_edges(8, e);
}

Graph path(Index n) {
  std::vector<std::tuple<Index, Index, double>> e;
  for (Index i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1, 1.0);
  return Graph::from_edges(n, e);
}

std::set<Index> side_of(const Bipartition& p, Index v) {
  const auto& f = p.first;
  if (std::find(f.begin(), f.end(), v) != f.end()) return {f.begin(), f.end()};
  return {p.second.begin(), p.second.end()};
}

}  // namespace

TEST(MarketGraph, CorrelationMagnitudes) {
  Rng rng(8);
  const Vector a = rng.normal_vector(200);
  Matrix r(200, 3);
  r.col(0) = a;
  r.col(1) = 2.0 * a.array() + 1.0;
  r.col(2) = -a;
  const Graph g = market_graph(r);
  EXPECT_NEAR(g.w()(0, 1), 1.0, 1e-12);
  EXPECT_NEAR(g.w()(0, 2), 1.0, 1e-12);
  EXPECT_EQ(g.w()(1, 1), 0.0);
}

TEST(MarketGraph, IndependentAssetsAreWeaklyLinked) {
  Rng rng(9);
  const Graph g = market_graph(rng.normal_matrix(10000, 2));
  EXPECT_LT(g.w()(0, 1), 0.05);
}

TEST(MarketGraph, ZeroVarianceNamesAsset) {
  Matrix r = Matrix::Ones(5, 2);
  r(0, 0) = 2.0;
  try {
    market_graph(r);
    FAIL();
  } catch (const InvalidArgument& e) {
    EXPECT_NE(std::string(e.what()).find("asset 1"), std::string::npos);
  }
}

TEST(MinVariance, IdentityIsUniform) {
  const Vector w = min_variance_weights(Matrix::Identity(4, 4));
  EXPECT_LT((w.array() - 0.25).abs().maxCoeff(), 1e-15);
}

TEST(MinVariance, InverseVarianceOnDiagonal) {
  const Vector w = min_variance_weights(Eigen::Vector2d(1.0, 4.0).asDiagonal());
  EXPECT_NEAR(w(0), 0.8, 1e-15);
  EXPECT_NEAR(w(1), 0.2, 1e-15);
}

TEST(MinVariance, BeatsRandomFeasiblePortfolios) {
  Rng rng(10);
  const Matrix s = verify::detail::random_spd(rng, 6, 0.2, 3.0);
  const Vector w = min_variance_weights(s);
  EXPECT_NEAR(w.sum(), 1.0, 1e-12);
  const double best = w.dot(s * w);
  for (int t = 0; t < 1000; ++t) {
    Vector v = rng.normal_vector(6);
    v /= v.sum();
    EXPECT_LE(best, v.dot(s * v) * (1.0 + 1e-12));
  }
}

TEST(MinVariance, SingularIsAnError) {
  Matrix s = Matrix::Ones(3, 3);
  EXPECT_THROW(min_variance_weights(s), NumericalError);
}

TEST(CutValue, DisconnectedCliquesCostNothing) {
  const Graph g = Graph::from_edges(6, {{0, 1, 1.0}, {1, 2, 1.0}, {0, 2, 1.0}, {3, 4, 1.0}, {4, 5, 1.0}, {3, 5, 1.0}});
  const Bipartition p{{0, 1, 2}, {3, 4, 5}};
  EXPECT_EQ(cut_value(g, p, CutKind::normalized), 0.0);
  EXPECT_EQ(cut_value(g, p, CutKind::volume), 0.0);
  EXPECT_THROW(cut_value(g, Bipartition{{0, 1, 2, 3, 4, 5}, {}}, CutKind::normalized), InvalidArgument);
}

TEST(CutValue, RayleighQuotients) {
  Rng rng(11);
  const Graph g = market_graph(rng.normal_matrix(50, 9));
  const Matrix l = laplacian(g).l;
  const Matrix d = g.degrees().asDiagonal();
  for (int t = 0; t < 50; ++t) {
    std::vector<bool> side(9);
    for (auto&& s : side) s = rng.uniform() < 0.5;
    side[0] = true;
    side[8] = false;
    const Bipartition p = bipartition_from_sides(side);
    const Vector xn = cut_indicator(g, p, CutKind::normalized);
    const Vector xv = cut_indicator(g, p, CutKind::volume);
    EXPECT_NEAR(cut_value(g, p, CutKind::normalized), xn.dot(l * xn) / xn.squaredNorm(), 1e-10);
    EXPECT_NEAR(cut_value(g, p, CutKind::volume), xv.dot(l * xv) / xv.dot(d * xv), 1e-10);
  }
}

TEST(SpectralBisect, BarbellSplitsAtBridge) {
  const Graph g = barbell();
  Bipartition best;
  const double opt = oracle::brute_force_min_cut(g, CutKind::normalized, &best);
  const BisectResult r = spectral_bisect(g, CutKind::normalized);
  EXPECT_NEAR(r.value, opt, 1e-12);
  EXPECT_EQ(side_of(r.part, 0), (std::set<Index>{0, 1, 2, 3}));
  EXPECT_EQ(side_of(best, 0), (std::set<Index>{0, 1, 2, 3}));
  EXPECT_EQ(side_of(spectral_bisect(g, CutKind::volume).part, 0), (std::set<Index>{0, 1, 2, 3}));
}

TEST(SpectralBisect, FourCycleIsBalanced) {
  const Graph g = Graph::from_edges(4, {{0, 1, 1.0}, {1, 2, 1.0}, {2, 3, 1.0}, {3, 0, 1.0}});
  const BisectResult r = spectral_bisect(g, CutKind::normalized);
  EXPECT_EQ(r.part.first.size(), 2u);
  EXPECT_EQ(r.part.second.size(), 2u);
  EXPECT_NEAR(r.value, oracle::brute_force_min_cut(g, CutKind::normalized), 1e-12);
}

TEST(SpectralBisect, PathOfSix) {
  const BisectResult r = spectral_bisect(path(6), CutKind::normalized);
  EXPECT_EQ(side_of(r.part, 0), (std::set<Index>{0, 1, 2}));
  EXPECT_NEAR(r.value, oracle::brute_force_min_cut(path(6), CutKind::normalized), 1e-12);
}

TEST(SpectralBisect, DisconnectedIsFlagged) {
  const BisectResult r = spectral_bisect(Graph::from_edges(4, {{0, 1, 1.0}, {2, 3, 1.0}}), CutKind::normalized);
  EXPECT_TRUE(r.disconnected);
  EXPECT_EQ(r.value, 0.0);
  EXPECT_EQ(side_of(r.part, 0), (std::set<Index>{0, 1}));
}

TEST(RepeatedCuts, LeafCountsAndPartition) {
  Rng rng(12);
  const Graph g = market_graph(rng.normal_matrix(40, 12));
  EXPECT_EQ(repeated_cuts(g, 1).leaves().size(), 2u);
  for (LeafSelect sel : {LeafSelect::largest_size, LeafSelect::largest_volume}) {
    const CutTree t = repeated_cuts(g, 4, sel);
    const auto leaves = t.leaves();
    ASSERT_EQ(leaves.size(), 5u);
    std::vector<Index> all;
    for (int l : leaves) all.insert(all.end(), t.nodes[l].vertices.begin(), t.nodes[l].vertices.end());
    EXPECT_EQ(all.size(), 12u);
    std::sort(all.begin(), all.end());
    EXPECT_EQ(all, t.nodes[0].vertices);
  }
}

TEST(RepeatedCuts, SingletonLeavesAreSkipped) {
  const CutTree t = repeated_cuts(path(3), 2);
  EXPECT_EQ(t.leaves().size(), 3u);
  EXPECT_THROW(repeated_cuts(path(3), 3), InvalidArgument);
}

TEST(Allocate, FiveLeafTree) {
  const CutTree t = verify::five_leaf_tree();
  const Vector w1 = allocate(t, AllocScheme::as1);
  const Vector w2 = allocate(t, AllocScheme::as2);
  // leaves {0,1} {2,3} {4,5} at depth 2, {6,7} {8,9} at depth 3
  for (Index i : {0, 1, 2, 3, 4, 5}) EXPECT_DOUBLE_EQ(w1(i), 0.125);
  for (Index i : {6, 7, 8, 9}) EXPECT_DOUBLE_EQ(w1(i), 0.0625);
  for (Index i = 0; i < 10; ++i) EXPECT_DOUBLE_EQ(w2(i), 0.1);
}

TEST(Allocate, SingleCutHalves) {
  CutTree t = CutTree::root(3);
  t.split(0, {0}, {1, 2});
  const Vector w = allocate(t, AllocScheme::as2);
  EXPECT_DOUBLE_EQ(w(0), 0.5);
  EXPECT_DOUBLE_EQ(w(1) + w(2), 0.5);
}

TEST(Sharpe, ConstantReturnsAreAnError) {
  EXPECT_THROW(sharpe(Matrix::Constant(10, 1, 0.01), Vector::Ones(1)), NumericalError);
}

TEST(Sharpe, SingleAssetAndDirectFormula) {
  Rng rng(13);
  Matrix r(60, 3);
  for (Index t = 0; t < 60; ++t)
    for (Index j = 0; j < 3; ++j) r(t, j) = (t < 30 ? 0.01 : -0.005) + 0.02 * rng.normal();
  const Vector a = r.col(0);
  const double m = a.mean();
  const double sd = std::sqrt((a.array() - m).square().sum() / 59.0);
  EXPECT_NEAR(sharpe(r.leftCols(1), Vector::Ones(1)), m / sd, 1e-12);

  const Vector w(Eigen::Vector3d(0.5, 0.3, 0.2));
  const Vector p = r * w;
  const double pm = p.mean();
  const double psd = std::sqrt((p.array() - pm).square().sum() / 59.0);
  EXPECT_NEAR(sharpe(r, w, 252.0), pm / psd * std::sqrt(252.0), 1e-12);
}
