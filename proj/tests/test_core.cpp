#include <graphtopo/graphtopo.hpp>
#include <graphtopo/oracles.hpp>

#include <gtest/gtest.h>

#include <atomic>
#include <filesystem>
#include <numbers>

using namespace graphtopo;

namespace {

Graph random_graph(Rng& rng, Index n, double p = 0.5) {
  Matrix w = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j)
      if (rng.uniform() < p) w(i, j) = w(j, i) = rng.uniform(0.1, 2.0);
  return Graph(w);
}

}  // namespace

TEST(Graph, RejectsAsymmetricNegativeAndSelfLoops) {
  Matrix w = Matrix::Zero(3, 3);
  w(0, 1) = 1.0;
  EXPECT_THROW(Graph{w}, InvalidArgument);
  w(1, 0) = 1.0;
  w(2, 2) = 1.0;
  EXPECT_THROW(Graph{w}, InvalidArgument);
  w(2, 2) = 0.0;
  w(0, 2) = w(2, 0) = -1.0;
  EXPECT_THROW(Graph{w}, InvalidArgument);
}

TEST(Graph, FromEdgesDegreesVolume) {
  const Graph g = Graph::from_edges(3, {{0, 1, 2.0}, {1, 2, 0.5}});
  EXPECT_EQ(g.edge_count(), 2);
  EXPECT_DOUBLE_EQ(g.degrees()(1), 2.5);
  EXPECT_DOUBLE_EQ(g.volume(), 5.0);
}

TEST(Laplacian, ChainWeightsGiveKnownDiagonal) {
  const Laplacian l = laplacian(Graph(datasets::chain4_weights()));
  Vector want(4);
  want << 0.5, 1.0, 0.5 + 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  EXPECT_LT((l.l.diagonal() - want).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_NEAR(l.l(2, 2), 1.207, 1e-3);
  EXPECT_LT(l.l.rowwise().sum().cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT(l.l.colwise().sum().cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Laplacian, EmptyGraphIsZero) {
  EXPECT_TRUE(laplacian(Graph::empty(3)).l.isZero(0.0));
}

TEST(Laplacian, RandomRowSumsVanish) {
  Rng rng(6);
  const Graph g = random_graph(rng, 6);
  const Matrix l = laplacian(g).l;
  for (Index i = 0; i < 6; ++i) {
    double s = 0.0;
    for (Index j = 0; j < 6; ++j) s += l(i, j);
    EXPECT_NEAR(s, 0.0, 1e-12);
  }
}

TEST(Laplacian, NormalizedHasUnitDiagonalAndSpectrumInZeroTwo) {
  Rng rng(3);
  for (int t = 0; t < 20; ++t) {
    Graph g = random_graph(rng, 7, 0.6);
    if (!is_connected(g)) continue;
    const Laplacian l = laplacian(g, LaplacianKind::normalized);
    EXPECT_LT((l.l.diagonal() - Vector::Ones(7)).cwiseAbs().maxCoeff(), 1e-12);
    const Vector ev = eig_sym(l.l).values;
    EXPECT_GT(ev.minCoeff(), -1e-10);
    EXPECT_LT(ev.maxCoeff(), 2.0 + 1e-10);
  }
}

TEST(Laplacian, NormalizedRejectsIsolatedVertexWhenStrict) {
  const Graph g = Graph::from_edges(3, {{0, 1, 1.0}});
  EXPECT_THROW(laplacian(g, LaplacianKind::normalized, true), InvalidArgument);
}

TEST(Laplacian, GeneralizedAcceptsPrecisionRejectsPositiveOffDiagonal) {
  const Matrix q = datasets::chain4_precision();
  const Laplacian l = generalized_laplacian(q);
  EXPECT_EQ(l.kind, LaplacianKind::generalized);
  Matrix want = -q;
  want.diagonal().setZero();
  EXPECT_EQ(weights_of(l.l), want);
  Matrix bad = q;
  bad(0, 1) = bad(1, 0) = 0.5;
  EXPECT_THROW(generalized_laplacian(bad), InvalidArgument);
}

TEST(EigSym, TwoByTwo) {
  Matrix m(2, 2);
  m << 2, -1, -1, 2;
  const SpectralDecomp d = eig_sym(m);
  EXPECT_NEAR(d.values(0), 1.0, 1e-12);
  EXPECT_NEAR(d.values(1), 3.0, 1e-12);
}

TEST(EigSym, PathLaplacianClosedForm) {
  const Laplacian l = laplacian(Graph::from_edges(4, {{0, 1, 1}, {1, 2, 1}, {2, 3, 1}}));
  const Vector ev = eig_sym(l.l).values;
  for (int k = 0; k < 4; ++k) EXPECT_NEAR(ev(k), 2.0 - 2.0 * std::cos(k * std::numbers::pi / 4.0), 1e-12);
}

TEST(EigSym, ConnectedGraphHasZeroEigenvalue) {
  EXPECT_NEAR(eig_sym(laplacian(Graph(datasets::chain4_weights())).l).values(0), 0.0, 1e-10);
}

TEST(EigSym, SignConventionLargestEntryPositive) {
  Rng rng(4);
  const Matrix a = rng.normal_matrix(6, 6);
  const SpectralDecomp d = eig_sym(a + a.transpose());
  for (Index k = 0; k < 6; ++k) {
    Index arg;
    d.vectors.col(k).cwiseAbs().maxCoeff(&arg);
    EXPECT_GT(d.vectors(arg, k), 0.0);
  }
  EXPECT_LT((d.vectors.transpose() * d.vectors - Matrix::Identity(6, 6)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(EigSym, RejectsAsymmetric) {
  Matrix m(2, 2);
  m << 1, 2, 0, 1;
  EXPECT_THROW(eig_sym(m), InvalidArgument);
}

TEST(PseudoInverse, Identity) {
  EXPECT_LT((pseudo_inverse(Matrix::Identity(3, 3)) - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(PseudoInverse, LaplacianProjectorIdentity) {
  Rng rng(11);
  Graph g = random_graph(rng, 7, 0.7);
  while (!is_connected(g)) g = random_graph(rng, 7, 0.7);
  const Matrix l = laplacian(g).l;
  const Matrix p = l * pseudo_inverse(l);
  const Matrix want = Matrix::Identity(7, 7) - Matrix::Constant(7, 7, 1.0 / 7.0);
  EXPECT_LT((p - want).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(PseudoInverse, RankDeficientDiagonal) {
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 2.0;
  const Matrix p = pseudo_inverse(d);
  EXPECT_DOUBLE_EQ(p(0, 0), 0.5);
  EXPECT_DOUBLE_EQ(p(1, 1), 0.0);
  EXPECT_EQ(numerical_rank(d), 1);
}

TEST(Smoothness, ConstantVectorIsZero) {
  Rng rng(2);
  const Graph g = random_graph(rng, 5);
  EXPECT_NEAR(smoothness(laplacian(g), Vector::Constant(5, 3.0)), 0.0, 1e-12);
}

TEST(Smoothness, VertexOrderingMatters) {
  Vector x(8);
  x << 0.7, 0.2, 0.6, 1.1, -0.3, -1.1, 1.3, -0.7;
  // path visiting vertices in order of value versus in index order
  std::vector<Index> sorted(8);
  for (Index i = 0; i < 8; ++i) sorted[i] = i;
  std::sort(sorted.begin(), sorted.end(), [&](Index a, Index b) { return x(a) < x(b); });
  std::vector<std::tuple<Index, Index, double>> eb, ec;
  for (Index i = 0; i + 1 < 8; ++i) {
    eb.emplace_back(sorted[i], sorted[i + 1], 1.0);
    ec.emplace_back(i, i + 1, 1.0);
  }
  const double sb = smoothness(laplacian(Graph::from_edges(8, eb)), x);
  const double sc = smoothness(laplacian(Graph::from_edges(8, ec)), x);
  EXPECT_LT(sb, sc);
}

TEST(Smoothness, MatchesPairwiseDifferenceSum) {
  Rng rng(9);
  const Graph g = random_graph(rng, 9);
  const Vector x = rng.normal_vector(9);
  double want = 0.0;
  for (Index m = 0; m < 9; ++m)
    for (Index n = 0; n < 9; ++n) want += 0.5 * g.w()(m, n) * (x(m) - x(n)) * (x(m) - x(n));
  EXPECT_NEAR(smoothness(laplacian(g), x), want, 1e-10);
}

TEST(SourceVector, BalanceChecked) {
  Vector v(3);
  v << 1, -1, 0.5;
  EXPECT_THROW(SourceVector{v}, InvalidArgument);
  EXPECT_NO_THROW(SourceVector(v, false));
}

TEST(Components, LabelsDisjointParts) {
  const Graph g = Graph::from_edges(5, {{0, 1, 1}, {2, 3, 1}});
  const auto c = components(g.w());
  EXPECT_EQ(c[0], c[1]);
  EXPECT_EQ(c[2], c[3]);
  EXPECT_NE(c[0], c[2]);
  EXPECT_NE(c[4], c[0]);
  EXPECT_FALSE(is_connected(g));
}

TEST(MseDb, KnownValue) {
  const Matrix a = Matrix::Constant(2, 2, 0.1);
  EXPECT_NEAR(mse_db(a, Matrix::Zero(2, 2)), -20.0, 1e-12);
}

TEST(Rng, SeededStreamsAreReproducible) {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.normal(), b.normal());
  Rng s1 = Rng::substream(42, 3), s2 = Rng::substream(42, 3), s3 = Rng::substream(42, 4);
  const double v1 = s1.uniform();
  EXPECT_EQ(v1, s2.uniform());
  EXPECT_NE(v1, s3.uniform());
}

TEST(Rng, NormalMoments) {
  Rng rng(1);
  double s = 0.0, s2 = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double v = rng.normal();
    s += v;
    s2 += v * v;
  }
  EXPECT_NEAR(s / n, 0.0, 0.01);
  EXPECT_NEAR(s2 / n, 1.0, 0.02);
}

TEST(Rng, BelowStaysInRange) {
  Rng rng(5);
  std::vector<int> hist(7, 0);
  for (int i = 0; i < 70000; ++i) ++hist[rng.below(7)];
  for (int h : hist) EXPECT_NEAR(h, 10000, 500);
}

TEST(Parallel, CoversEveryIndexOnceAndPropagates) {
  set_max_threads(4);
  std::vector<std::atomic<int>> hits(1000);
  parallel_for(1000, [&](size_t i) { hits[i].fetch_add(1); });
  for (auto& h : hits) EXPECT_EQ(h.load(), 1);
  EXPECT_THROW(parallel_for(10, [](size_t i) {
                 if (i == 7) throw NumericalError("boom");
               }),
               NumericalError);
  set_max_threads(0);
}

TEST(Io, ShortestRoundTripFormatting) {
  EXPECT_EQ(io::fmt(0.1), "0.1");
  EXPECT_EQ(io::fmt(-0.0), "0");
  EXPECT_EQ(io::fmt(1e-300), "1e-300");
  Rng rng(8);
  for (int i = 0; i < 1000; ++i) {
    const double v = rng.normal(0, 1e3);
    EXPECT_EQ(io::parse_double(io::fmt(v)), v);
  }
}

TEST(Io, CsvRoundTripAndRaggedRejection) {
  Rng rng(3);
  const Matrix m = rng.normal_matrix(4, 3);
  EXPECT_EQ(io::parse_csv(io::to_csv(m)), m);
  EXPECT_THROW(io::parse_csv("1,2\n3\n"), InvalidArgument);
  EXPECT_THROW(io::parse_csv("1,abc\n"), InvalidArgument);
}

TEST(Io, GraphJsonRoundTrip) {
  const Graph g = datasets::weighted8();
  const Graph h = io::graph_from_json(io::graph_to_json(g));
  EXPECT_EQ(g.w(), h.w());
  const DirectedGraph d = datasets::web8();
  EXPECT_EQ(io::digraph_from_json(io::digraph_to_json(d)).w(), d.w());
  EXPECT_THROW(io::graph_from_json(nlohmann::json::parse(R"({"n": 2, "edges": [[0, 5, 1.0]]})")), InvalidArgument);
}

TEST(Io, AtomicWriteLeavesNoTempFile) {
  const auto dir = std::filesystem::temp_directory_path() / "graphtopo_io_test";
  std::filesystem::create_directories(dir);
  const auto p = dir / "m.csv";
  io::write_csv(p, Matrix::Identity(2, 2));
  EXPECT_EQ(io::read_csv(p), Matrix(Matrix::Identity(2, 2)));
  int files = 0;
  for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(dir)) ++files;
  EXPECT_EQ(files, 1);
  std::filesystem::remove_all(dir);
}
