#include "varsdp/graph.hpp"
#include "varsdp/instances.hpp"
#include "varsdp/variety.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace varsdp;

namespace {

VectorXd balanced_signs(int n, std::mt19937_64& rng) {
  VectorXd a(n);
  for (int i = 0; i < n; ++i) a(i) = i < n / 2 ? 1.0 : -1.0;
  std::shuffle(a.data(), a.data() + n, rng);
  return a;
}

// [0, H1] in the tangent cone at a e1^T: rows of H1 on the negative side are
// the negated rows of the positive side, plus a common a lambda^T term.
MatrixXd cone_member(const VectorXd& a, Eigen::Index r, std::mt19937_64& rng) {
  const Eigen::Index n = a.size();
  MatrixXd G = oracle::random_matrix(n / 2, r - 1, rng);
  VectorXd lam = oracle::random_matrix(r - 1, 1, rng);
  MatrixXd H = MatrixXd::Zero(n, r);
  Eigen::Index p = 0, m = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (a(i) > 0) H.row(i).tail(r - 1) = G.row(p++);
    else H.row(i).tail(r - 1) = -G.row(m++);
    H.row(i).tail(r - 1) += a(i) * lam.transpose();
  }
  return H;
}

MatrixXd sign_factor(const VectorXd& a, Eigen::Index r) {
  MatrixXd R = MatrixXd::Zero(a.size(), r);
  R.col(0) = a;
  return R;
}

double distance_to_variety(const MatrixXd& Y) {
  auto proj = project_onto_variety(Y);
  EXPECT_TRUE(proj.has_value());
  return proj ? (*proj - Y).norm() : INFINITY;
}

MatrixXd two_cluster_rows(double eps) {
  MatrixXd Y(4, 2);
  Y << 0, 1, 0, 1 - eps / 2, 0, -1, -eps / 2, -1 + eps / 2;
  return Y;
}

}  // namespace

TEST(Variety, RandomPointFeasibleAndDeterministic) {
  for (int s = 0; s < 20; ++s) {
    VarietyPoint p = random_point(20 + s, 1 + s % 6, s);
    EXPECT_TRUE(p.is_feasible(1e-10));
    EXPECT_LE(p.row_norm_residual(), 1e-10);
    EXPECT_LE(p.column_sum_residual(), 1e-10 * std::sqrt(double(p.n())));
  }
  EXPECT_EQ(random_point(30, 4, 5).factor(), random_point(30, 4, 5).factor());
}

TEST(Variety, IsSingularExamples) {
  std::mt19937_64 rng(1);
  VectorXd a = balanced_signs(8, rng);
  VarietyPoint sing(sign_factor(a, 3));
  for (double d : {1e-6, 0.02, 0.5, 0.9}) EXPECT_TRUE(is_singular(sing, d));

  // two orthogonal balanced sign columns: R^T R = (n/2) I
  VectorXd a1(8), a2(8);
  a1 << 1, 1, 1, 1, -1, -1, -1, -1;
  a2 << 1, 1, -1, -1, 1, 1, -1, -1;
  MatrixXd R(8, 2);
  R << a1 / std::sqrt(2.0), a2 / std::sqrt(2.0);
  VarietyPoint half(R);
  ASSERT_TRUE(half.is_feasible());
  EXPECT_NEAR(half.spectral_norm() * half.spectral_norm(), 4.0, 1e-12);
  EXPECT_FALSE(is_singular(half, 0.02));

  // ||R||^2 = (1 - delta) n exactly
  const double delta = 0.25;
  R << std::sqrt(1 - delta) * a1, std::sqrt(delta) * a2;
  EXPECT_TRUE(is_singular(VarietyPoint(R), delta));
  EXPECT_FALSE(is_singular(VarietyPoint(R), 0.2));
}

TEST(Variety, ProjectTangentMatchesDenseOracle) {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 20; ++t) {
    const int n = 6 + t, r = 2 + t % 4;
    VarietyPoint p = random_point(n, r, 100 + t);
    MatrixXd C = oracle::random_matrix(n, r, rng);
    MatrixXd H = project_tangent(p, C).H;
    MatrixXd ref = oracle::dense_tangent_projection(p.factor(), C);
    EXPECT_LE((H - ref).norm(), 1e-10 * (1.0 + C.norm()));
    EXPECT_LE((H.transpose() * VectorXd::Ones(n)).norm(), 1e-10 * H.norm());
    EXPECT_LE(H.cwiseProduct(p.factor()).rowwise().sum().norm(), 1e-10 * H.norm());
  }
}

TEST(Variety, ProjectTangentExamples) {
  VarietyPoint p = random_point(15, 4, 3);
  EXPECT_EQ(project_tangent(p, MatrixXd::Zero(15, 4)).H.norm(), 0.0);
  EXPECT_LE(project_tangent(p, p.factor()).H.norm(), 1e-10);
}

TEST(Variety, ProjectTangentIdempotentAndSelfAdjoint) {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 20; ++t) {
    VarietyPoint p = random_point(25, 5, 200 + t);
    MatrixXd C1 = oracle::random_matrix(25, 5, rng), C2 = oracle::random_matrix(25, 5, rng);
    MatrixXd P1 = project_tangent(p, C1).H, P2 = project_tangent(p, C2).H;
    EXPECT_LE((project_tangent(p, P1).H - P1).norm(), 1e-12 * (1.0 + C1.norm()));
    EXPECT_NEAR(P1.cwiseProduct(C2).sum(), C1.cwiseProduct(P2).sum(), 1e-10 * (1.0 + C1.norm() * C2.norm()));
  }
}

TEST(Variety, ConstantObjectiveHasZeroGradient) {
  Laplacian L(instances::complete(10));
  for (int s = 0; s < 5; ++s) {
    VarietyPoint p = random_point(10, 3, s);
    MatrixXd g = riemannian_gradient(p, L.apply(p.factor())).H;
    EXPECT_LE(g.norm(), 1e-10);
  }
}

TEST(Variety, NearSingularBaseThrows) {
  std::mt19937_64 rng(5);
  VarietyPoint sing(sign_factor(balanced_signs(8, rng), 3));
  EXPECT_THROW(project_tangent(sing, MatrixXd::Ones(8, 3)), NearSingularError);
}

TEST(Variety, NormalizeRows) {
  VarietyPoint p = random_point(12, 3, 6);
  EXPECT_LE((normalize_rows(p.factor()) - p.factor()).norm(), 1e-15);
  EXPECT_LE((normalize_rows(2.0 * p.factor()) - p.factor()).norm(), 1e-15);
  std::mt19937_64 rng(6);
  MatrixXd Y = oracle::random_matrix(50, 4, rng);
  EXPECT_LE((normalize_rows(Y).rowwise().norm().array() - 1.0).abs().maxCoeff(), 1e-14);
  Y.row(3).setZero();
  EXPECT_THROW(normalize_rows(Y), std::invalid_argument);
}

TEST(GeometricMedian, SymmetricCross) {
  MatrixXd Y(4, 2);
  Y << 1, 0, -1, 0, 0, 1, 0, -1;
  GeometricMedian m = geometric_median(Y, 1e-12, 500);
  EXPECT_FALSE(m.at_vertex);
  EXPECT_LE(m.b.norm(), 1e-12);
}

TEST(GeometricMedian, CollinearRowsGiveVertex) {
  for (double eps : {0.5, 1e-2, 1e-4}) {
    MatrixXd Y = two_cluster_rows(eps);
    GeometricMedian m = geometric_median(Y, default_median_tol(Y), 500);
    EXPECT_TRUE(m.at_vertex) << eps;
    EXPECT_NEAR(m.b(0), 0.0, 1e-12);
    EXPECT_NEAR(m.b(1), 1.0 - eps / 2, 1e-12);
    EXPECT_FALSE(project_onto_variety(Y).has_value());
  }
}

TEST(GeometricMedian, MatchesGridOracle) {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 10; ++t) {
    MatrixXd Y = oracle::random_matrix(7, 3, rng);
    GeometricMedian m = geometric_median(Y, 1e-13, 500);
    VectorXd ref = oracle::grid_median(Y);
    EXPECT_LE((m.b - ref).norm(), 1e-6);
  }
}

TEST(Retract, ZeroStepReturnsBase) {
  VarietyPoint p = random_point(20, 5, 8);
  Retraction res = retract(p, TangentVector{MatrixXd::Zero(20, 5)});
  EXPECT_EQ(res.backtracks, 0);
  EXPECT_LE((res.point.factor() - p.factor()).norm(), 1e-12);
}

TEST(Retract, SamplingLowerBound) {
  std::mt19937_64 rng(9);
  VarietyPoint p = random_point(20, 5, 9);
  MatrixXd H = project_tangent(p, 0.1 * oracle::random_matrix(20, 5, rng)).H;
  Retraction res = retract(p, TangentVector{H});
  ASSERT_EQ(res.backtracks, 0);
  EXPECT_TRUE(res.point.is_feasible(1e-10));
  const MatrixXd Y = p.factor() + H;
  const double d = (res.point.factor() - Y).norm();
  for (int s = 0; s < 1000; ++s) {
    VarietyPoint q = random_point(20, 5, 10000 + s);
    ASSERT_LE(d, (q.factor() - Y).norm());
  }
  // nearby feasible points as well
  for (int s = 0; s < 50; ++s) {
    MatrixXd D = project_tangent(res.point, 1e-3 * oracle::random_matrix(20, 5, rng)).H;
    Retraction near = retract(res.point, TangentVector{D});
    EXPECT_LE(d, (near.point.factor() - Y).norm() + 1e-12);
  }
}

TEST(Retract, FirstOrderProperty) {
  std::mt19937_64 rng(10);
  VarietyPoint p = random_point(20, 5, 11);
  MatrixXd H = project_tangent(p, oracle::random_matrix(20, 5, rng)).H;
  H /= H.norm();
  double prev = INFINITY;
  std::vector<double> ratios;
  for (double t : {1e-1, 1e-2, 1e-3, 1e-4}) {
    Retraction res = retract(p, TangentVector{t * H});
    EXPECT_TRUE(res.point.is_feasible(1e-10));
    const double ratio = (res.point.factor() - (p.factor() + t * H)).norm() / t;
    EXPECT_LT(ratio, prev);
    prev = ratio;
    ratios.push_back(ratio);
  }
  EXPECT_LE(ratios.back(), 1e-2 * ratios.front());
}

TEST(Retract, BacktracksWhenMedianIsARow) {
  const double eps = 1e-2;
  MatrixXd R(4, 2);
  R << 1, 0, 0, 1, -1, 0, 0, -1;
  VarietyPoint p(R);
  ASSERT_TRUE(p.is_feasible());
  Retraction res = retract(p, TangentVector{two_cluster_rows(eps) - R});
  EXPECT_GE(res.backtracks, 1);
  EXPECT_TRUE(res.point.is_feasible(1e-10));

  // from the rank-one point the whole segment keeps the collinear structure
  MatrixXd S(4, 2);
  S << 0, 1, 0, 1, 0, -1, 0, -1;
  try {
    retract(VarietyPoint(S), TangentVector{two_cluster_rows(eps) - S}, 2.0, 4);
    FAIL() << "expected RetractionError";
  } catch (const RetractionError& e) {
    EXPECT_EQ(e.backtracks(), 4);
  }
}

TEST(Rounding, FixedPointAndParity) {
  std::mt19937_64 rng(11);
  VectorXd a = balanced_signs(10, rng);
  auto s = round_to_singular(VarietyPoint(sign_factor(a, 3)), 0.01);
  ASSERT_TRUE(s.has_value());
  const double sign = s->a(0) == a(0) ? 1.0 : -1.0;
  EXPECT_EQ(s->a, sign * a);
  EXPECT_EQ(s->a(0), 1.0);

  for (int n : {5, 9, 21}) {
    VarietyPoint p = random_point(n, 3, n);
    EXPECT_FALSE(round_to_singular(p, 0.1).has_value());
  }
  EXPECT_THROW(round_to_singular(VarietyPoint(sign_factor(a, 2)), 0.5), std::invalid_argument);
}

TEST(Rounding, PerturbationRecoversSignsWithinBound) {
  std::mt19937_64 rng(12);
  for (int t = 0; t < 20; ++t) {
    VectorXd a = balanced_signs(8, rng);
    MatrixXd H = cone_member(a, 3, rng);
    auto proj = project_onto_variety(sign_factor(a, 3) + 1e-4 * H / H.norm());
    ASSERT_TRUE(proj.has_value());
    VarietyPoint p(*proj);
    ASSERT_TRUE(p.is_feasible());
    const double s1 = p.spectral_norm();
    const double delta = std::max(1.0 - s1 * s1 / 8.0, 1e-14);
    ASSERT_TRUE(is_singular(p, delta));
    auto s = round_to_singular(p, std::min(delta, 0.49));
    ASSERT_TRUE(s.has_value());
    EXPECT_TRUE(s->a == a || s->a == -a);
    MatrixXd RR = p.factor() * p.factor().transpose();
    EXPECT_LE((s->a * s->a.transpose() - RR).norm(), 2.0 * std::sqrt(delta) * 8.0);
  }
}

TEST(Rounding, BoundOnRandomNearSingularPoints) {
  std::mt19937_64 rng(13);
  int tested = 0;
  for (int t = 0; t < 200; ++t) {
    VectorXd a = balanced_signs(12, rng);
    MatrixXd Y = sign_factor(a, 4) + 0.3 * oracle::random_matrix(12, 4, rng);
    auto proj = project_onto_variety(Y);
    if (!proj) continue;
    VarietyPoint p(*proj);
    const double s1 = p.spectral_norm();
    const double delta = std::max(1.0 - s1 * s1 / 12.0, 1e-14);
    if (delta >= 0.5) continue;
    auto s = round_to_singular(p, delta);
    if (!s) continue;
    ++tested;
    MatrixXd RR = p.factor() * p.factor().transpose();
    EXPECT_LE((s->a * s->a.transpose() - RR).norm(), 2.0 * std::sqrt(delta) * 12.0);
  }
  EXPECT_GT(tested, 20);
}

TEST(TangentCone, Examples) {
  std::mt19937_64 rng(14);
  VectorXd a = balanced_signs(8, rng);
  SingularPoint sp{a};
  VectorXd lam = oracle::random_matrix(2, 1, rng);
  MatrixXd H = MatrixXd::Zero(8, 3);
  H.rightCols(2) = a * lam.transpose();
  EXPECT_TRUE(tangent_cone_member(sp, H, 1e-12));
  H(0, 0) = 0.1;
  EXPECT_FALSE(tangent_cone_member(sp, H, 1e-12));
  EXPECT_TRUE(tangent_cone_member(sp, cone_member(a, 3, rng), 1e-12));
  MatrixXd bad = MatrixXd::Zero(8, 3);
  bad(0, 1) = 1.0;
  bad(1, 1) = -1.0;
  if (a(0) == a(1)) EXPECT_FALSE(tangent_cone_member(sp, bad, 1e-12));
}

TEST(TangentCone, DistanceDecaysSuperlinearly) {
  std::mt19937_64 rng(15);
  for (int t = 0; t < 5; ++t) {
    VectorXd a = balanced_signs(8, rng);
    MatrixXd H = cone_member(a, 3, rng);
    H /= H.norm();
    ASSERT_TRUE(tangent_cone_member(SingularPoint{a}, H, 1e-12));
    MatrixXd R = sign_factor(a, 3);
    std::vector<double> ratio;
    for (double s : {1e-2, 1e-3, 1e-4}) ratio.push_back(distance_to_variety(R + s * H) / s);
    EXPECT_LT(ratio[1], 0.2 * ratio[0]);
    EXPECT_LT(ratio[2], 0.2 * ratio[1]);
  }
}

TEST(SecondTangent, Examples) {
  std::mt19937_64 rng(16);
  VectorXd a = balanced_signs(8, rng);
  SingularPoint sp{a};
  // case (ii): generic H1
  MatrixXd H = cone_member(a, 3, rng);
  MatrixXd W = MatrixXd::Zero(8, 3);
  W.col(0) = -a.cwiseProduct(H.rightCols(2).rowwise().squaredNorm());
  EXPECT_TRUE(second_tangent_member(sp, H, W, 1e-10));
  // case (i): H1 = a lambda^T
  MatrixXd Hi = MatrixXd::Zero(8, 3);
  Hi.rightCols(2) = a * Eigen::RowVector2d(0.3, -0.7);
  MatrixXd Wi = MatrixXd::Zero(8, 3);
  Wi.col(0) = -a.cwiseProduct(Hi.rightCols(2).rowwise().squaredNorm());
  EXPECT_TRUE(second_tangent_member(sp, Hi, Wi, 1e-10));
  // W1 centered but with a^T diag(W1 W1^T) != 0
  MatrixXd Wbad = Wi;
  int plus = -1, minus = -1;
  for (int i = 0; i < 8; ++i) (a(i) > 0 ? plus : minus) = i;
  Wbad(plus, 1) = 1.0;
  Wbad(minus, 1) = -1.0;
  for (int i = 0; i < 8; ++i)
    if (a(i) > 0 && i != plus) {
      Wbad(i, 2) = 1.0;
      for (int j = 0; j < 8; ++j)
        if (a(j) > 0 && j != plus && j != i) { Wbad(j, 2) = -1.0; break; }
      break;
    }
  EXPECT_FALSE(second_tangent_member(sp, Hi, Wbad, 1e-10));
  EXPECT_FALSE(second_tangent_member(sp, H, Wbad, 1e-10));
}

TEST(SecondTangent, DistanceDecaysFasterThanSquare) {
  std::mt19937_64 rng(17);
  for (int t = 0; t < 5; ++t) {
    VectorXd a = balanced_signs(8, rng);
    MatrixXd H = cone_member(a, 3, rng);
    H /= H.norm();
    MatrixXd W = MatrixXd::Zero(8, 3);
    W.col(0) = -a.cwiseProduct(H.rightCols(2).rowwise().squaredNorm());
    ASSERT_TRUE(second_tangent_member(SingularPoint{a}, H, W, 1e-10));
    MatrixXd R = sign_factor(a, 3);
    std::vector<double> ratio;
    for (double s : {1e-1, 1e-2}) ratio.push_back(distance_to_variety(R + s * H + 0.5 * s * s * W) / (s * s));
    EXPECT_LT(ratio[1], 0.2 * ratio[0]);
  }
}
