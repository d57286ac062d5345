#include "varsdp/certify.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>

namespace varsdp {

std::string_view to_string(ProblemKind k) {
  return k == ProblemKind::Bisection ? "bisect" : "equipart";
}

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::Converged: return "converged";
    case Termination::CertifiedSingular: return "certified-singular";
    case Termination::MaxIterations: return "max-iterations";
    case Termination::LineSearchFailed: return "line-search-failed";
    case Termination::Stalled: return "stalled";
    case Termination::TooManyEvents: return "too-many-events";
  }
  return "unknown";
}

DualRecovery recover_duals(const VarietyPoint& p, const Eigen::Ref<const MatrixXd>& Theta,
                           const Eigen::Ref<const MatrixXd>& C_eff) {
  const MatrixXd& R = p.factor();
  if (C_eff.rows() != R.rows() || C_eff.cols() != R.cols() || Theta.rows() != R.rows() ||
      Theta.cols() != R.cols()) {
    throw std::invalid_argument("recover_duals: shape mismatch");
  }
  const double n = static_cast<double>(R.rows());
  MatrixXd G = C_eff + Theta;
  VectorXd d = R.cwiseProduct(G).rowwise().sum();
  VectorXd s = G.colwise().sum().transpose();

  MatrixXd schur = n * MatrixXd::Identity(R.cols(), R.cols()) - R.transpose() * R;
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(schur);
  const double lo = es.eigenvalues().minCoeff();
  const double condition = lo > 0.0 ? n / lo : std::numeric_limits<double>::infinity();
  if (!(condition <= 1e12)) throw NearSingularError(condition);

  VectorXd rhs = s - R.transpose() * d;
  VectorXd z = es.eigenvectors() * (es.eigenvectors().transpose() * rhs).cwiseQuotient(es.eigenvalues());
  VectorXd y = d - R * z;
  return DualRecovery{std::move(y), std::move(z), condition};
}

namespace {

struct MinEig {
  double value;
  bool converged;
};

MinEig centered_min_eig(const Laplacian& L, const VectorXd& lambda, const MatrixXd* U1, const MatrixXd* block,
                        const EigConfig& eig) {
  const Eigen::Index n = L.n();
  auto apply = [&](const Eigen::Ref<const VectorXd>& x, Eigen::Ref<VectorXd> y) {
    VectorXd v = center_vector(x);
    VectorXd Sv = L.apply_vector(v) - lambda.cwiseProduct(v);
    if (U1 && U1->cols() > 0) Sv -= *U1 * (*block * (U1->transpose() * v));
    y = center_vector(Sv);
  };
  const double scale = 1.0 + L.frobenius_norm();
  EigenPair pair = lanczos_min_eig(apply, n, eig.tol * scale, eig.max_iter, eig.seed);
  return MinEig{pair.value, pair.converged};
}

}  // namespace

Certificate residues_with_multiplier(const Eigen::Ref<const MatrixXd>& R, const Laplacian& L,
                                     const VectorXd& lambda, const EigConfig& eig) {
  if (R.rows() != L.n() || lambda.size() != L.n()) throw std::invalid_argument("residues: shape mismatch");
  const double n = static_cast<double>(R.rows());
  const double denom = 1.0 + L.frobenius_norm();

  Certificate c;
  c.lambda = lambda;
  c.Rp = (R.rowwise().squaredNorm().array() - 1.0).matrix().norm() / (1.0 + std::sqrt(n));
  MatrixXd SR = L.apply(R) - lambda.asDiagonal() * R;
  c.Rc = std::abs(R.cwiseProduct(SR).sum()) / denom;
  MinEig me = centered_min_eig(L, lambda, nullptr, nullptr, eig);
  c.eig_min = me.value;
  c.eig_converged = me.converged;
  c.Rd = std::max(0.0, -me.value) / denom;
  return c;
}

Certificate residues_bisection(const VarietyPoint& p, const Laplacian& L, const EigConfig& eig) {
  const MatrixXd& R = p.factor();
  DualRecovery d = recover_duals(p, MatrixXd::Zero(R.rows(), R.cols()), L.apply(R));
  Certificate c = residues_with_multiplier(R, L, d.y, eig);
  c.mu = std::move(d.z);
  return c;
}

Certificate residues_equipartition(const VarietyPoint& p, const MatrixXd& Z, const Laplacian& L, double alpha,
                                   const EigConfig& eig, double tau_alpha) {
  const MatrixXd& R = p.factor();
  if (Z.rows() != R.cols() || Z.cols() != R.cols()) throw std::invalid_argument("residues: Z shape mismatch");
  const double n = static_cast<double>(R.rows());
  const double denom = 1.0 + L.frobenius_norm();

  MatrixXd LR = L.apply(R);
  DualRecovery d = recover_duals(p, MatrixXd::Zero(R.rows(), R.cols()), LR - 2.0 * R * Z);
  const VectorXd& lambda = d.y;

  SpectralSplit split = spectral_split(p.svd(), alpha, tau_alpha);
  const MatrixXd& U1 = split.U1;
  MatrixXd block = U1.transpose() * (L.apply(U1) - lambda.asDiagonal() * U1);
  block = 0.5 * (block + block.transpose());

  Certificate c;
  c.lambda = lambda;
  c.mu = d.z;
  c.bound_width = U1.cols();
  const double row_res = (R.rowwise().squaredNorm().array() - 1.0).matrix().norm() / (1.0 + std::sqrt(n));
  c.Rp = std::max(row_res, p.spectral_norm() - std::sqrt(alpha));

  MatrixXd SR = LR - lambda.asDiagonal() * R;
  double inner = R.cwiseProduct(SR).sum();
  double top = -std::numeric_limits<double>::infinity();
  if (U1.cols() > 0) {
    MatrixXd UtR = U1.transpose() * R;
    inner -= (block * UtR).cwiseProduct(UtR).sum();
    top = Eigen::SelfAdjointEigenSolver<MatrixXd>(block, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff();
  }
  c.Rc = std::abs(inner) / denom;

  MinEig me = centered_min_eig(L, lambda, &U1, &block, eig);
  c.eig_min = me.value;
  c.eig_converged = me.converged;
  c.Rd = std::max(top, std::max(-me.value, 0.0)) / denom;
  return c;
}

}  // namespace varsdp
