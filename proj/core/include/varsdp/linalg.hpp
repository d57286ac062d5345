#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <stdexcept>

namespace varsdp {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Thin SVD R = U diag(s) V^T with k = numerical rank columns.
struct ThinSVD {
  MatrixXd U;  // n x k, orthonormal columns
  VectorXd s;  // k, descending, positive
  MatrixXd V;  // r x k, orthonormal columns

  Eigen::Index rank() const noexcept { return s.size(); }
  double spectral_norm() const noexcept { return s.size() ? s(0) : 0.0; }
};

/// Tall-skinny inputs (n > 4r) go through a Householder QR and an SVD of the
/// r x r triangular factor; others use a one-sided Jacobi SVD directly.
/// Singular values below max(n, r) * eps * s_1 are dropped.
/// Throws std::invalid_argument on empty or non-finite input.
ThinSVD thin_svd(const Eigen::Ref<const MatrixXd>& R);

/// Nearest negative-semidefinite matrix in Frobenius norm.
/// Throws std::invalid_argument when M is not symmetric to 1e-10 (relative).
MatrixXd project_nsd(const Eigen::Ref<const MatrixXd>& M);
/// M - project_nsd(M).
MatrixXd project_psd(const Eigen::Ref<const MatrixXd>& M);

/// X - e (e^T X) / n.
MatrixXd center_apply(const Eigen::Ref<const MatrixXd>& X);
VectorXd center_vector(const Eigen::Ref<const VectorXd>& x);

// Columns of U whose singular value satisfies s^2 >= alpha (1 - tau_alpha),
// i.e. those sitting on the spectral bound. The complement of range(R) is kept
// implicit: use complement_apply.
struct SpectralSplit {
  MatrixXd U1;
  MatrixXd U;  // full range basis of R, the "U1 U2" part
  double tau_alpha = 0.0;

  Eigen::Index bound_width() const noexcept { return U1.cols(); }
  /// (I - U U^T) x, the projector onto the U3 block.
  VectorXd complement_apply(const Eigen::Ref<const VectorXd>& x) const;
};

inline constexpr double kDefaultTauAlpha = 1e-6;

SpectralSplit spectral_split(const ThinSVD& svd, double alpha, double tau_alpha = kDefaultTauAlpha);

/// y = S x for a symmetric operator on R^n.
using SymmetricOperator = std::function<void(const Eigen::Ref<const VectorXd>& x, Eigen::Ref<VectorXd> y)>;

struct EigenPair {
  double value = 0.0;
  VectorXd vector;
  double residual = 0.0;  // ||S v - value v||
  int iterations = 0;
  bool converged = false;
};

/// Smallest eigenvalue of a symmetric operator by Lanczos with full
/// reorthogonalization. Converged when ||S v - lambda v|| <= tol (1 + |lambda|).
/// On non-convergence the best Ritz pair is returned with converged = false.
EigenPair lanczos_min_eig(const SymmetricOperator& apply, Eigen::Index n, double tol, int max_iter,
                          std::uint64_t seed);

/// Largest eigenvalue, via lanczos_min_eig on -S.
EigenPair lanczos_max_eig(const SymmetricOperator& apply, Eigen::Index n, double tol, int max_iter,
                          std::uint64_t seed);

}  // namespace varsdp
