#include "varsdp/linalg.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <random>

using namespace varsdp;

namespace {

SymmetricOperator dense_op(const MatrixXd& S) {
  return [S](const Eigen::Ref<const VectorXd>& x, Eigen::Ref<VectorXd> y) { y = S * x; };
}

}  // namespace

TEST(ThinSvd, RankOneSignMatrix) {
  VectorXd a(6);
  a << 1, -1, 1, 1, -1, -1;
  MatrixXd R = MatrixXd::Zero(6, 3);
  R.col(0) = a;
  ThinSVD svd = thin_svd(R);
  ASSERT_EQ(svd.rank(), 1);
  EXPECT_NEAR(svd.s(0), std::sqrt(6.0), 1e-14);
}

TEST(ThinSvd, Isotropic) {
  std::mt19937_64 rng(2);
  MatrixXd Q = oracle::random_orthogonal(12, rng).leftCols(4) * std::sqrt(3.0);
  ThinSVD svd = thin_svd(Q);
  ASSERT_EQ(svd.rank(), 4);
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(svd.s(i), std::sqrt(3.0), 1e-12);
}

TEST(ThinSvd, ReconstructionOracle) {
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> rows(1, 500), cols(1, 30);
  for (int t = 0; t < 1000; ++t) {
    const int n = rows(rng), r = cols(rng);
    MatrixXd R = oracle::random_matrix(n, r, rng);
    ThinSVD svd = thin_svd(R);
    MatrixXd back = svd.U * svd.s.asDiagonal() * svd.V.transpose();
    ASSERT_LE((back - R).norm(), 1e-10 * R.norm()) << n << "x" << r;
    if (t % 50 == 0) {
      VectorXd ref = Eigen::JacobiSVD<MatrixXd>(R).singularValues();
      for (Eigen::Index i = 0; i < svd.rank(); ++i) EXPECT_NEAR(svd.s(i), ref(i), 1e-8 * ref(0));
      EXPECT_LE((svd.U.transpose() * svd.U - MatrixXd::Identity(svd.rank(), svd.rank())).norm(), 1e-10);
    }
  }
}

TEST(ThinSvd, RejectsNonFinite) {
  MatrixXd R = MatrixXd::Ones(3, 2);
  R(1, 1) = std::nan("");
  EXPECT_THROW(thin_svd(R), std::invalid_argument);
  EXPECT_THROW(thin_svd(MatrixXd(0, 2)), std::invalid_argument);
}

TEST(ProjectNsd, Examples) {
  MatrixXd M = Eigen::Vector2d(1, -1).asDiagonal();
  MatrixXd P = project_nsd(M);
  EXPECT_NEAR((P - MatrixXd(Eigen::Vector2d(0, -1).asDiagonal())).norm(), 0.0, 1e-15);

  std::mt19937_64 rng(8);
  MatrixXd B = oracle::random_matrix(5, 5, rng);
  MatrixXd N = -B * B.transpose();
  EXPECT_LE((project_nsd(N) - N).norm(), 1e-12 * N.norm());
}

TEST(ProjectNsd, VariationalCharacterization) {
  std::mt19937_64 rng(9);
  for (int t = 0; t < 20; ++t) {
    MatrixXd M = oracle::random_symmetric(5, rng);
    MatrixXd P = project_nsd(M), Q = project_psd(M);
    EXPECT_LE((P + Q - M).norm(), 1e-14 * (1.0 + M.norm()));
    EXPECT_NEAR((M - P).cwiseProduct(P).sum(), 0.0, 1e-10);
    EXPECT_LE(Eigen::SelfAdjointEigenSolver<MatrixXd>(P).eigenvalues().maxCoeff(), 1e-12);
    EXPECT_GE(Eigen::SelfAdjointEigenSolver<MatrixXd>(Q).eigenvalues().minCoeff(), -1e-12);
  }
  MatrixXd A = MatrixXd::Zero(2, 2);
  A(0, 1) = 1.0;
  EXPECT_THROW(project_nsd(A), std::invalid_argument);
}

TEST(Center, Examples) {
  std::mt19937_64 rng(10);
  VectorXd b = oracle::random_matrix(3, 1, rng);
  MatrixXd X = VectorXd::Ones(7) * b.transpose();
  EXPECT_LE(center_apply(X).norm(), 1e-14);

  MatrixXd Y = oracle::random_matrix(7, 3, rng);
  Y.rowwise() -= Y.colwise().mean();
  EXPECT_LE((center_apply(Y) - Y).norm(), 1e-14);

  MatrixXd Z = oracle::random_matrix(9, 4, rng);
  MatrixXd once = center_apply(Z);
  EXPECT_LE((center_apply(once) - once).norm(), 1e-14 * Z.norm());
  EXPECT_LE((center_vector(Z.col(0)) - once.col(0)).norm(), 1e-14);
}

TEST(Lanczos, Identity) {
  EigenPair p = lanczos_min_eig(dense_op(MatrixXd::Identity(10, 10)), 10, 1e-12, 100, 1);
  EXPECT_TRUE(p.converged);
  EXPECT_NEAR(p.value, 1.0, 1e-12);
}

TEST(Lanczos, Centering) {
  const int n = 8;
  MatrixXd J = MatrixXd::Identity(n, n) - MatrixXd::Constant(n, n, 1.0 / n);
  EigenPair p = lanczos_min_eig(dense_op(J), n, 1e-12, 100, 3);
  EXPECT_TRUE(p.converged);
  EXPECT_NEAR(p.value, 0.0, 1e-12);
  EXPECT_NEAR(std::abs(p.vector.sum()) / std::sqrt(double(n)), 1.0, 1e-10);
}

TEST(Lanczos, SparseRandomMatchesDense) {
  const int n = 200;
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-1.0, 1.0), coin(0.0, 1.0);
  MatrixXd S = MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j)
      if (i == j || coin(rng) < 0.03) S(i, j) = S(j, i) = u(rng);
  const double ref = Eigen::SelfAdjointEigenSolver<MatrixXd>(S, Eigen::EigenvaluesOnly).eigenvalues()(0);
  EigenPair p = lanczos_min_eig(dense_op(S), n, 1e-10, 400, 5);
  EXPECT_TRUE(p.converged);
  EXPECT_NEAR(p.value, ref, 1e-8);
  EXPECT_LE((S * p.vector - p.value * p.vector).norm(), 1e-10 * (1.0 + std::abs(p.value)));

  const double top = Eigen::SelfAdjointEigenSolver<MatrixXd>(S, Eigen::EigenvaluesOnly).eigenvalues()(n - 1);
  EigenPair q = lanczos_max_eig(dense_op(S), n, 1e-10, 400, 5);
  EXPECT_NEAR(q.value, top, 1e-8);
}

TEST(Lanczos, CenteredOperatorBound) {
  std::mt19937_64 rng(13);
  const int n = 40;
  MatrixXd J = MatrixXd::Identity(n, n) - MatrixXd::Constant(n, n, 1.0 / n);
  for (int t = 0; t < 10; ++t) {
    MatrixXd S = oracle::random_symmetric(n, rng);
    const double s2 = Eigen::SelfAdjointEigenSolver<MatrixXd>(S, Eigen::EigenvaluesOnly).eigenvalues().cwiseAbs().maxCoeff();
    EigenPair p = lanczos_min_eig(dense_op(J * S * J), n, 1e-10, 200, t);
    EXPECT_GE(p.value, -s2 - 1e-10);
  }
}

TEST(Lanczos, Deterministic) {
  std::mt19937_64 rng(14);
  MatrixXd S = oracle::random_symmetric(30, rng);
  EigenPair a = lanczos_min_eig(dense_op(S), 30, 1e-10, 100, 99);
  EigenPair b = lanczos_min_eig(dense_op(S), 30, 1e-10, 100, 99);
  EXPECT_EQ(a.value, b.value);
  EXPECT_EQ(a.vector, b.vector);
}

TEST(SpectralSplit, Examples) {
  // R with singular values (2, 1): alpha = 4 puts the top one on the bound.
  MatrixXd R = MatrixXd::Zero(6, 2);
  R(0, 0) = 2.0;
  R(1, 1) = 1.0;
  ThinSVD svd = thin_svd(R);
  EXPECT_EQ(spectral_split(svd, 4.0).bound_width(), 1);
  EXPECT_EQ(spectral_split(svd, 8.0).bound_width(), 0);
}

TEST(SpectralSplit, RandomRecheck) {
  std::mt19937_64 rng(15);
  for (int t = 0; t < 20; ++t) {
    MatrixXd R = oracle::random_matrix(30, 5, rng);
    ThinSVD svd = thin_svd(R);
    const double alpha = svd.s(1) * svd.s(1) * (1.0 + 1e-7);
    SpectralSplit split = spectral_split(svd, alpha);
    EXPECT_GE(split.bound_width(), 1);
    for (Eigen::Index j = 0; j < split.U1.cols(); ++j)
      EXPECT_GE((R.transpose() * split.U1.col(j)).squaredNorm(), alpha * (1.0 - split.tau_alpha) * (1.0 - 1e-12));
    VectorXd x = oracle::random_matrix(30, 1, rng);
    EXPECT_LE((R.transpose() * split.complement_apply(x)).norm(), 1e-12 * x.norm() * R.norm());
  }
}
