#include <graphtopo/graphtopo.hpp>
#include <graphtopo/oracles.hpp>

#include <gtest/gtest.h>

using namespace graphtopo;

namespace {

Matrix chain_correlation(Index n) {
  Matrix r(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) r(i, j) = static_cast<double>(std::min(i, j) + 1);
  return r;
}

}  // namespace

TEST(SoftThreshold, DeadZoneAndOddSymmetry) {
  EXPECT_EQ(soft_threshold(0.5, 1.0), 0.0);
  EXPECT_DOUBLE_EQ(soft_threshold(2.0, 0.5), 1.5);
  EXPECT_DOUBLE_EQ(soft_threshold(-2.0, 0.5), -1.5);
  Vector v(3);
  v << -3, 0.2, 3;
  EXPECT_EQ(soft_threshold(v, 1.0), Vector((Vector(3) << -2, 0, 2).finished()));
}

TEST(SoftThreshold, IsContraction) {
  Rng rng(10);
  for (int i = 0; i < 10000; ++i) {
    const double a = rng.normal(0, 2), b = rng.normal(0, 2), t = rng.uniform(0, 1);
    EXPECT_LE(std::abs(soft_threshold(a, t) - soft_threshold(b, t)), std::abs(a - b) + 1e-14);
  }
}

TEST(Lasso, LargeRhoGivesZero) {
  Rng rng(1);
  const Matrix a = rng.normal_matrix(10, 5);
  const Vector y = rng.normal_vector(10);
  LassoConfig cfg;
  cfg.rho = 2.0 * (a.transpose() * y).cwiseAbs().maxCoeff() + 1.0;
  EXPECT_TRUE(lasso_ista(a, y, cfg).x.isZero(0.0));
}

TEST(Lasso, SparseSignalRecovery) {
  Rng rng(1);
  const Matrix a = rng.normal_matrix(40, 60) / std::sqrt(40.0);
  Vector x = Vector::Zero(60);
  x(5) = 1.0;
  x(12) = 0.5;
  x(31) = 0.9;
  x(45) = -0.75;
  LassoConfig cfg;
  cfg.rho = 0.01;
  cfg.max_iter = 1000;
  const LassoResult r = lasso_ista(a, a * x, cfg);
  for (Index i = 0; i < 60; ++i) EXPECT_EQ(r.x(i) != 0.0, x(i) != 0.0) << "index " << i;
  EXPECT_LT((r.x - x).cwiseAbs().maxCoeff(), 0.05);
}

TEST(Lasso, MatchesGridSearchOnThreeVariables) {
  Rng rng(3);
  const Matrix a = rng.normal_matrix(6, 3);
  const Vector y = rng.normal_vector(6);
  LassoConfig cfg;
  cfg.rho = 0.1;
  cfg.max_iter = 100000;
  cfg.tol = 1e-14;
  const Vector x = lasso_ista(a, y, cfg).x;
  const Vector g = oracle::grid_lasso(a, y, 0.1, -3.0, 3.0, 61, 12);
  EXPECT_LT((x - g).cwiseAbs().maxCoeff(), 1e-3);
}

TEST(Lasso, ZeroRhoIsLeastSquares) {
  Rng rng(4);
  const Matrix a = rng.normal_matrix(20, 5);
  const Vector y = rng.normal_vector(20);
  LassoConfig cfg;
  cfg.max_iter = 100000;
  cfg.tol = 1e-14;
  const Vector x = lasso_ista(a, y, cfg).x;
  const Vector ls = (a.transpose() * a).ldlt().solve(a.transpose() * y);
  EXPECT_LT((x - ls).cwiseAbs().maxCoeff(), 1e-5);
}

TEST(Lasso, ObjectiveNeverIncreases) {
  Rng rng(5);
  for (int t = 0; t < 20; ++t) {
    LassoConfig cfg;
    cfg.rho = rng.uniform(0.0, 2.0);
    cfg.trace = true;
    cfg.check_monotone = true;
    const LassoResult r = lasso_ista(rng.normal_matrix(15, 25), rng.normal_vector(15), cfg);
    for (size_t k = 1; k < r.objective.size(); ++k) EXPECT_LE(r.objective[k], r.objective[k - 1] * (1 + 1e-12) + 1e-12);
  }
}

TEST(Lasso, RejectsBadInput) {
  LassoConfig cfg;
  cfg.rho = -1.0;
  EXPECT_THROW(lasso_ista(Matrix::Identity(2, 2), Vector::Ones(2), cfg), InvalidArgument);
  cfg.rho = 0.1;
  EXPECT_THROW(lasso_ista(Matrix::Identity(2, 2), Vector::Ones(3), cfg), InvalidArgument);
}

TEST(Glasso, ZeroRhoInvertsChainCorrelation) {
  const GlassoResult g = glasso(datasets::chain4_correlation());
  EXPECT_LT((g.q - datasets::chain4_precision()).cwiseAbs().maxCoeff(), 1e-4);
}

TEST(Glasso, IdentityShrinks) {
  for (double rho : {0.0, 0.3, 2.0}) {
    GlassoConfig cfg;
    cfg.rho = rho;
    const GlassoResult g = glasso(Matrix::Identity(5, 5), cfg);
    EXPECT_LT((g.q - Matrix::Identity(5, 5) / (1.0 + rho)).cwiseAbs().maxCoeff(), 1e-6);
  }
}

TEST(Glasso, MatchesCoordinateDescentReferenceOnChain) {
  const Matrix r = chain_correlation(6);
  GlassoConfig cfg;
  cfg.rho = 0.3;
  cfg.eps = 1e-12;
  cfg.max_sweeps = 1000;
  const GlassoResult g = glasso(r, cfg);
  const Matrix ref = oracle::cd_glasso(r, 0.3);
  EXPECT_LT((g.q - ref).cwiseAbs().maxCoeff(), 1e-4);
  EXPECT_LT((g.q - g.q.transpose()).cwiseAbs().maxCoeff(), 1e-8);
  // the penalised estimate is not exactly tridiagonal; the chain neighbours dominate every row
  for (const Matrix* q : {&g.q, &ref}) {
    for (Index i = 0; i < 6; ++i) {
      double chain = std::numeric_limits<double>::infinity(), other = 0.0;
      for (Index j = 0; j < 6; ++j) {
        if (i == j) continue;
        if (std::abs(i - j) == 1) {
          chain = std::min(chain, std::abs((*q)(i, j)));
          EXPECT_LT((*q)(i, j), 0.0);
        } else {
          other = std::max(other, std::abs((*q)(i, j)));
        }
      }
      EXPECT_GT(chain, 2.0 * other) << "row " << i;
    }
  }
}

TEST(Glasso, WellConditionedInverse) {
  Rng rng(12);
  for (int t = 0; t < 5; ++t) {
    const Matrix b = rng.normal_matrix(8, 30);
    const Matrix r = b * b.transpose() / 30.0 + 0.5 * Matrix::Identity(8, 8);
    const GlassoResult g = glasso(r);
    EXPECT_LT((g.q * r - Matrix::Identity(8, 8)).cwiseAbs().rowwise().sum().maxCoeff(), 1e-4);
  }
}

TEST(Glasso, RejectsIndefinite) {
  Matrix r(2, 2);
  r << 1, 2, 2, 1;
  EXPECT_THROW(glasso(r), InvalidArgument);
}

TEST(Precision, ChainExampleIsExactInverse) {
  const PrecisionResult p = precision_matrix(datasets::chain4_correlation());
  EXPECT_FALSE(p.rank_deficient);
  EXPECT_LT((p.q - datasets::chain4_precision()).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LT((precision_matrix(Matrix::Identity(3, 3)).q - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Precision, RankDeficientUsesPseudoInverse) {
  Rng rng(2);
  const Matrix x = rng.normal_matrix(4, 2);
  const Matrix r = x * x.transpose() / 2.0;
  const PrecisionResult p = precision_matrix(r);
  EXPECT_TRUE(p.rank_deficient);
  EXPECT_EQ(p.rank, 2);
  const Matrix& q = p.q;
  EXPECT_LT((r * q * r - r).cwiseAbs().maxCoeff(), 1e-8);
  EXPECT_LT((q * r * q - q).cwiseAbs().maxCoeff(), 1e-8);
  EXPECT_LT((r * q - (r * q).transpose()).cwiseAbs().maxCoeff(), 1e-8);
  EXPECT_LT((q * r - (q * r).transpose()).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Precision, NormalizedChainAndSmallCases) {
  const Matrix qn = normalize_precision(datasets::chain4_precision());
  EXPECT_LT((qn - datasets::chain4_normalized_precision()).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_NEAR(qn(2, 3), -1.0 / std::sqrt(2.0), 1e-12);
  EXPECT_EQ(normalize_precision(Matrix::Identity(3, 3)), Matrix(Matrix::Identity(3, 3)));
  Matrix m(2, 2);
  m << 4, 3, 3, 9;
  EXPECT_DOUBLE_EQ(normalize_precision(m)(0, 1), 0.5);
  m(1, 1) = 0.0;
  EXPECT_THROW(normalize_precision(m), InvalidArgument);
}
