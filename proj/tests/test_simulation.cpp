#include <graphtopo/graphtopo.hpp>

#include <gtest/gtest.h>

using namespace graphtopo;

TEST(Simulate, IdentityFilterReturnsDraws) {
  const Graph g = datasets::weighted8();
  SimSpec spec;
  spec.h = {1.0};
  spec.p = 5;
  spec.seed = 21;
  const Matrix x = simulate(g, spec).x;
  for (Index p = 0; p < 5; ++p) {
    Rng rng = Rng::substream(21, static_cast<std::uint64_t>(p));
    EXPECT_EQ(Vector(x.col(p)), rng.normal_vector(8));
  }
}

TEST(Simulate, SingleEigenvectorHasRayleighSmoothness) {
  const Graph g = datasets::weighted8();
  const SpectralDecomp d = eig_sym(laplacian(g).l);
  for (Index k : {0, 3, 7}) {
    SimSpec spec;
    spec.mode = SimMode::bandlimited;
    spec.indices = {k};
    spec.amplitudes = {1.0};
    const Vector x = simulate(g, spec).x.col(0);
    EXPECT_LT((x - d.vectors.col(k)).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_NEAR(smoothness(laplacian(g), x), d.values(k), 1e-10);
  }
}

TEST(Simulate, DiffusionCorrelationMatchesFilterSquare) {
  const Graph g = datasets::weighted8();
  SimSpec spec;
  spec.h = {0.3, 0.2, 0.5};
  spec.p = 10000;
  spec.seed = 2024;
  const Matrix r = correlation_matrix(simulate(g, spec).x);
  const SpectralDecomp d = eig_sym(laplacian(g, LaplacianKind::normalized).l);
  const Vector hl = (0.3 + 0.2 * d.values.array() + 0.5 * d.values.array().square()).matrix();
  const Matrix want = d.vectors * hl.cwiseAbs2().asDiagonal() * d.vectors.transpose();
  EXPECT_LT((r - want).norm() / want.norm(), 0.05);
}

TEST(Simulate, SourcesAreBalancedAndSolveTheSystem) {
  const Graph g = datasets::weighted8();
  SimSpec spec;
  spec.mode = SimMode::sources;
  spec.p = 20;
  spec.seed = 4;
  spec.reference = 7;
  const SimResult r = simulate(g, spec);
  const Matrix l = laplacian(g).l;
  for (Index p = 0; p < 20; ++p) {
    EXPECT_NEAR(r.sources.col(p).sum(), 0.0, 1e-12);
    EXPECT_EQ(r.x(7, p), 0.0);
    EXPECT_LT((l * r.x.col(p) - r.sources.col(p)).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(Simulate, DipoleHasTwoOppositeSources) {
  SimSpec spec;
  spec.mode = SimMode::dipole;
  spec.p = 10;
  spec.seed = 5;
  const SimResult r = simulate(datasets::weighted8(), spec);
  for (Index p = 0; p < 10; ++p) {
    EXPECT_EQ((r.sources.col(p).array() != 0.0).count(), 2);
    EXPECT_NEAR(r.sources.col(p).sum(), 0.0, 1e-15);
  }
}

TEST(Simulate, PinnedPairIsHarmonicElsewhere) {
  SimSpec spec;
  spec.mode = SimMode::pinned_pair;
  spec.p = 10;
  spec.seed = 6;
  const Graph g = datasets::weighted8();
  const Matrix x = simulate(g, spec).x;
  for (Index p = 0; p < 10; ++p) {
    const Vector lx = laplacian(g).l * x.col(p);
    EXPECT_LE((lx.array().abs() > 1e-10).count(), 2);
  }
}

TEST(Simulate, AdjacencyShiftOfSpikes) {
  SimSpec spec;
  spec.mode = SimMode::adjacency_shift;
  spec.shifts = 0;
  spec.spikes = 2;
  spec.spike_amplitudes = {1.0, 3.0};
  spec.p = 4;
  const Matrix x = simulate(datasets::weighted8(), spec).x;
  for (Index p = 0; p < 4; ++p) {
    EXPECT_DOUBLE_EQ(x.col(p).sum(), 4.0);
    EXPECT_EQ((x.col(p).array() != 0.0).count(), 2);
  }
}

TEST(Simulate, DeterministicAcrossThreadCounts) {
  SimSpec spec;
  spec.h = {0.3, 0.2, 0.5};
  spec.p = 300;
  spec.seed = 99;
  set_max_threads(1);
  const Matrix a = simulate(datasets::weighted8(), spec).x;
  set_max_threads(4);
  const Matrix b = simulate(datasets::weighted8(), spec).x;
  set_max_threads(0);
  EXPECT_EQ(a, b);
}

TEST(Simulate, ValidatesSpec) {
  SimSpec spec;
  spec.mode = SimMode::bandlimited;
  EXPECT_THROW(simulate(datasets::weighted8(), spec), InvalidArgument);
  spec.indices = {9};
  EXPECT_THROW(simulate(datasets::weighted8(), spec), InvalidArgument);
  SimSpec s2;
  s2.mode = SimMode::sources;
  EXPECT_THROW(simulate(Graph::from_edges(3, {{0, 1, 1.0}}), s2), InvalidArgument);
  EXPECT_THROW(parse_sim_mode("7"), InvalidArgument);
  EXPECT_EQ(parse_sim_mode("4"), SimMode::diffusion);
}
