#include "varsdp/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

namespace varsdp {

ThinSVD thin_svd(const Eigen::Ref<const MatrixXd>& R) {
  const Eigen::Index n = R.rows(), r = R.cols();
  if (n < 1 || r < 1) throw std::invalid_argument("thin_svd: empty matrix");
  if (!R.allFinite()) throw std::invalid_argument("thin_svd: non-finite entries");

  MatrixXd U, V;
  VectorXd s;
  if (n > 4 * r) {
    Eigen::HouseholderQR<MatrixXd> qr(R);
    MatrixXd T = qr.matrixQR().topRows(r).triangularView<Eigen::Upper>();
    Eigen::JacobiSVD<MatrixXd> svd(T, Eigen::ComputeFullU | Eigen::ComputeFullV);
    MatrixXd Q = qr.householderQ() * MatrixXd::Identity(n, r);
    U = Q * svd.matrixU();
    s = svd.singularValues();
    V = svd.matrixV();
  } else {
    Eigen::JacobiSVD<MatrixXd> svd(R, Eigen::ComputeThinU | Eigen::ComputeThinV);
    U = svd.matrixU();
    s = svd.singularValues();
    V = svd.matrixV();
  }

  const double cutoff =
      static_cast<double>(std::max(n, r)) * std::numeric_limits<double>::epsilon() * (s.size() ? s(0) : 0.0);
  Eigen::Index k = 0;
  while (k < s.size() && s(k) > cutoff) ++k;
  return ThinSVD{U.leftCols(k), s.head(k), V.leftCols(k)};
}

namespace {

void require_symmetric(const Eigen::Ref<const MatrixXd>& M) {
  if (M.rows() != M.cols()) throw std::invalid_argument("expected a square matrix");
  const double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
  if ((M - M.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw std::invalid_argument("matrix is not symmetric");
  }
}

}  // namespace

MatrixXd project_nsd(const Eigen::Ref<const MatrixXd>& M) {
  require_symmetric(M);
  if (M.size() == 0) return M;
  MatrixXd sym = 0.5 * (M + M.transpose());
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(sym);
  VectorXd lam = es.eigenvalues().cwiseMin(0.0);
  return es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
}

MatrixXd project_psd(const Eigen::Ref<const MatrixXd>& M) {
  return M - project_nsd(M);
}

MatrixXd center_apply(const Eigen::Ref<const MatrixXd>& X) {
  Eigen::RowVectorXd mean = X.colwise().mean();
  return X.rowwise() - mean;
}

VectorXd center_vector(const Eigen::Ref<const VectorXd>& x) {
  return x.array() - x.mean();
}

VectorXd SpectralSplit::complement_apply(const Eigen::Ref<const VectorXd>& x) const {
  return x - U * (U.transpose() * x);
}

SpectralSplit spectral_split(const ThinSVD& svd, double alpha, double tau_alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("spectral_split: alpha must be positive");
  if (!(tau_alpha > 0.0 && tau_alpha < 1.0)) throw std::invalid_argument("spectral_split: tau_alpha in (0,1)");
  const double threshold = alpha * (1.0 - tau_alpha);
  Eigen::Index p = 0;
  while (p < svd.s.size() && svd.s(p) * svd.s(p) >= threshold) ++p;
  return SpectralSplit{svd.U.leftCols(p), svd.U, tau_alpha};
}

EigenPair lanczos_min_eig(const SymmetricOperator& apply, Eigen::Index n, double tol, int max_iter,
                          std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("lanczos_min_eig: empty operator");
  const int steps = static_cast<int>(std::min<Eigen::Index>(std::max(max_iter, 1), n));

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  VectorXd q(n);
  for (Eigen::Index i = 0; i < n; ++i) q(i) = normal(rng);
  q.normalize();

  std::vector<VectorXd> basis;
  basis.reserve(steps);
  std::vector<double> alpha, beta;
  VectorXd w(n);

  EigenPair best;
  best.value = std::numeric_limits<double>::infinity();
  VectorXd ritz_coeffs;

  for (int j = 0; j < steps; ++j) {
    basis.push_back(q);
    apply(q, w);
    const double a = q.dot(w);
    alpha.push_back(a);
    w -= a * q;
    if (j > 0) w -= beta.back() * basis[j - 1];
    // Two passes of Gram-Schmidt against the whole basis.
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& v : basis) w -= v.dot(w) * v;
    const double b = w.norm();

    const int m = j + 1;
    VectorXd diag = Eigen::Map<VectorXd>(alpha.data(), m);
    VectorXd sub = m > 1 ? VectorXd(Eigen::Map<VectorXd>(beta.data(), m - 1)) : VectorXd();
    Eigen::SelfAdjointEigenSolver<MatrixXd> tri;
    tri.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    const double theta = tri.eigenvalues()(0);
    ritz_coeffs = tri.eigenvectors().col(0);
    const double estimate = std::abs(b * ritz_coeffs(m - 1));

    const double scale = std::max({std::abs(theta), diag.cwiseAbs().maxCoeff(), 1e-300});
    const bool breakdown = b <= 1e-13 * scale;
    best.value = theta;
    best.iterations = m;
    if (estimate <= tol * (1.0 + std::abs(theta)) || breakdown || m == steps) break;

    beta.push_back(b);
    q = w / b;
  }

  const int m = static_cast<int>(ritz_coeffs.size());
  VectorXd v = VectorXd::Zero(n);
  for (int i = 0; i < m; ++i) v += ritz_coeffs(i) * basis[i];
  v.normalize();
  VectorXd Sv(n);
  apply(v, Sv);
  best.value = v.dot(Sv);
  best.residual = (Sv - best.value * v).norm();
  best.converged = best.residual <= tol * (1.0 + std::abs(best.value)) || m == n;
  best.vector = std::move(v);
  return best;
}

EigenPair lanczos_max_eig(const SymmetricOperator& apply, Eigen::Index n, double tol, int max_iter,
                          std::uint64_t seed) {
  auto negated = [&apply](const Eigen::Ref<const VectorXd>& x, Eigen::Ref<VectorXd> y) {
    apply(x, y);
    y = -y;
  };
  EigenPair p = lanczos_min_eig(negated, n, tol, max_iter, seed);
  p.value = -p.value;
  return p;
}

}  // namespace varsdp
