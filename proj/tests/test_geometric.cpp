#include <graphtopo/graphtopo.hpp>
#include <graphtopo/oracles.hpp>

#include <gtest/gtest.h>

#include <numbers>

using namespace graphtopo;

TEST(Kernel, GaussianAtTauIsInverseE) {
  KernelSpec k;
  k.tau = 0.7;
  k.kappa = 1.0;
  Matrix c(2, 1);
  c << 0.0, 0.7;
  EXPECT_NEAR(geometric_weights(c, k).w()(0, 1), std::exp(-1.0), 1e-15);
  EXPECT_NEAR(geometric_weights(c, k).w()(0, 1), 0.3679, 1e-4);
}

TEST(Kernel, CutoffBeyondKappa) {
  KernelSpec k;
  k.kappa = 0.5;
  Matrix c(2, 1);
  c << 0.0, 0.6;
  EXPECT_EQ(geometric_weights(c, k).w()(0, 1), 0.0);
}

TEST(Kernel, OtherKinds) {
  KernelSpec k;
  k.kind = KernelKind::exp_lin;
  k.tau = 2.0;
  EXPECT_DOUBLE_EQ(kernel_value(k, 1.0), std::exp(-0.5));
  k.kind = KernelKind::inv_dist;
  EXPECT_DOUBLE_EQ(kernel_value(k, 4.0), 0.25);
  EXPECT_THROW(kernel_value(k, 0.0), InvalidArgument);
  EXPECT_EQ(parse_kernel("binary"), KernelKind::binary);
  EXPECT_THROW(parse_kernel("cosine"), InvalidArgument);
  k.tau = 0.0;
  EXPECT_THROW(k.validate(), InvalidArgument);
}

TEST(Kernel, BinaryEqualsRadiusAdjacency) {
  Rng rng(10);
  Matrix c(10, 2);
  for (Index i = 0; i < 10; ++i) c.row(i) << rng.uniform(), rng.uniform();
  KernelSpec k;
  k.kind = KernelKind::binary;
  k.kappa = 0.4;
  const Matrix w = geometric_weights(c, k).w();
  for (Index i = 0; i < 10; ++i)
    for (Index j = 0; j < 10; ++j) {
      const double dx = c(i, 0) - c(j, 0), dy = c(i, 1) - c(j, 1);
      const double want = (i != j && std::sqrt(dx * dx + dy * dy) <= 0.4) ? 1.0 : 0.0;
      EXPECT_EQ(w(i, j), want);
    }
}

TEST(Similarity, IdenticalSignalsGiveMaximalWeight) {
  Rng rng(1);
  Matrix x = rng.normal_matrix(4, 20);
  x.row(2) = x.row(0);
  const SimilarityResult s = similarity_weights(x, KernelSpec{});
  EXPECT_EQ(s.r2(0, 2), 0.0);
  EXPECT_EQ(s.g.w()(0, 2), 1.0);
  EXPECT_EQ(s.g.w().maxCoeff(), 1.0);
}

TEST(Similarity, GlobalNormalisationSumsToOne) {
  Rng rng(2);
  const SimilarityResult s = similarity_weights(rng.normal_matrix(7, 30), KernelSpec{});
  EXPECT_NEAR(s.r2.sum(), 1.0, 1e-10);
}

TEST(Similarity, EnergyFormTracksCorrelation) {
  Rng rng(3);
  const Index p = 10000;
  // unit-variance rows with prescribed correlations
  Matrix c(4, 4);
  c << 1, 0.8, 0.3, 0.0, 0.8, 1, 0.5, 0.2, 0.3, 0.5, 1, 0.6, 0.0, 0.2, 0.6, 1;
  const Matrix x = Matrix(c.llt().matrixL()) * rng.normal_matrix(4, p);
  const SimilarityResult s = similarity_weights(x, KernelSpec{}, SimilarityNorm::energy);
  const Matrix r = correlation_matrix(x);
  for (Index m = 0; m < 4; ++m)
    for (Index n = 0; n < 4; ++n) {
      if (m == n) continue;
      EXPECT_NEAR(s.r2(m, n), 2.0 * (1.0 - c(m, n)), 0.05);
      EXPECT_NEAR(s.r2(m, n), (r(m, m) + r(n, n) - 2.0 * r(m, n)) / std::sqrt(r(m, m) * r(n, n)), 1e-9);
    }
}

TEST(Similarity, AllEqualObservationsFlagged) {
  const SimilarityResult s = similarity_weights(Matrix::Ones(3, 4), KernelSpec{});
  EXPECT_TRUE(s.degenerate);
}

TEST(GeneralizedDistance, Cases) {
  Vector a(2), b(2);
  a << 3, 4;
  b << 0, 0;
  EXPECT_DOUBLE_EQ(generalized_distance(a, b, Matrix::Identity(2, 2)), 25.0);
  EXPECT_EQ(generalized_distance(a, b, Matrix::Zero(2, 2)), 0.0);
  Rng rng(4);
  Eigen::HouseholderQR<Matrix> qr(rng.normal_matrix(5, 2));
  const Matrix u = qr.householderQ() * Matrix::Identity(5, 2);
  const Vector c = rng.normal_vector(5), d = rng.normal_vector(5);
  EXPECT_NEAR(generalized_distance(c, d, u * u.transpose()), (u.transpose() * (c - d)).squaredNorm(), 1e-10);
  EXPECT_THROW(generalized_distance(a, b, -Matrix::Identity(2, 2)), InvalidArgument);
}

TEST(SwissRoll, ArclengthMatchesQuadrature) {
  const double pi = std::numbers::pi;
  const double q = oracle::adaptive_simpson([](double v) { return std::sqrt(1.0 + v * v); }, pi, 2.0 * pi, 1e-12) / (4.0 * pi);
  EXPECT_NEAR(swiss_roll_arclength(pi, 2.0 * pi), q, 1e-8);
  EXPECT_EQ(swiss_roll_arclength(2.0, 2.0), 0.0);
}

TEST(SwissRoll, EqualAnglesGiveHeightDistance) {
  const SwissRoll s = swiss_roll_graph(50, 3, KernelSpec{});
  for (Index i = 0; i < 50; ++i)
    for (Index j = 0; j < 50; ++j) {
      const double l = swiss_roll_arclength(s.v(i), s.v(j));
      EXPECT_NEAR(s.geodesic(i, j), std::hypot(l, s.u(i) - s.u(j)), 1e-14);
    }
  EXPECT_NEAR(s.geodesic(0, 0), 0.0, 0.0);
}

TEST(SwissRoll, SeededGraphIsByteIdentical) {
  KernelSpec k;
  k.tau = 0.2;
  k.kappa = 0.5;
  const SwissRoll a = swiss_roll_graph(100, 17, k), b = swiss_roll_graph(100, 17, k);
  EXPECT_EQ(io::to_csv(a.g.w()), io::to_csv(b.g.w()));
  EXPECT_EQ(io::to_csv(a.coords), io::to_csv(b.coords));
  EXPECT_NE(io::to_csv(swiss_roll_graph(100, 18, k).coords), io::to_csv(a.coords));
}
