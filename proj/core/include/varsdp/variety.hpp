#pragma once

#include "varsdp/linalg.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace varsdp {

/// Raised when the tangent-space solve degenerates because the base point
/// is (numerically) rank one. Callers route such points to the escape path.
class NearSingularError : public std::runtime_error {
 public:
  explicit NearSingularError(double condition)
      : std::runtime_error("base point is numerically singular (condition " + std::to_string(condition) + ")"),
        condition_(condition) {}
  double condition() const noexcept { return condition_; }

 private:
  double condition_;
};

class RetractionError : public std::runtime_error {
 public:
  explicit RetractionError(int backtracks)
      : std::runtime_error("retraction failed after " + std::to_string(backtracks) + " backtracks"),
        backtracks_(backtracks) {}
  int backtracks() const noexcept { return backtracks_; }

 private:
  int backtracks_;
};

/// A factor R (n x r) meant to lie on B(n,r) = {diag(R R^T) = e, R^T e = 0}.
/// The thin SVD is computed on first use and cached; do not share a point
/// across threads before the cache is filled.
class VarietyPoint {
 public:
  VarietyPoint() = default;
  explicit VarietyPoint(MatrixXd R) : R_(std::move(R)) {}

  const MatrixXd& factor() const noexcept { return R_; }
  Eigen::Index n() const noexcept { return R_.rows(); }
  Eigen::Index r() const noexcept { return R_.cols(); }

  const ThinSVD& svd() const;
  double spectral_norm() const { return svd().spectral_norm(); }

  /// max_i | ||row_i||^2 - 1 |
  double row_norm_residual() const;
  /// max_j | sum_i R_ij |
  double column_sum_residual() const;
  /// Both residuals within the documented invariants:
  /// row residual <= tol, column residual <= tol * sqrt(n).
  bool is_feasible(double tol = 1e-10) const;

 private:
  MatrixXd R_;
  mutable std::optional<ThinSVD> svd_;
};

struct TangentVector {
  MatrixXd H;
};

/// Balanced sign vector a with canonical singular point R = a e_1^T.
struct SingularPoint {
  VectorXd a;

  /// a e_1^T padded to r columns.
  MatrixXd factor(Eigen::Index r) const;
};

/// ||R||_2 >= sqrt(1 - delta) sqrt(n), i.e. R lies in B^{delta+}.
bool is_singular(const VarietyPoint& p, double delta);

/// The multiplier lambda_C^R of the diagonal constraints, obtained from a
/// single r x r solve with I - R^T R / n. Throws NearSingularError when that
/// matrix has condition number above 1e10.
VectorXd diag_multiplier(const VarietyPoint& base, const Eigen::Ref<const MatrixXd>& C);

/// Orthogonal projection of C onto the tangent space at a smooth base:
/// J (C - diag(lambda_C^R) R).
TangentVector project_tangent(const VarietyPoint& base, const Eigen::Ref<const MatrixXd>& C);

inline TangentVector riemannian_gradient(const VarietyPoint& base, const Eigen::Ref<const MatrixXd>& euclid_grad) {
  return project_tangent(base, euclid_grad);
}

/// Scales each row to unit norm. Throws std::invalid_argument on a row with
/// norm below 1e-14.
MatrixXd normalize_rows(const Eigen::Ref<const MatrixXd>& Y);

struct GeometricMedian {
  VectorXd b;
  bool at_vertex = false;
  bool converged = false;
  int iterations = 0;
  double gradient_norm = 0.0;  // of sum_i ||b - y_i|| at b (0 if at_vertex)
};

/// Weiszfeld iteration for argmin_b sum_i ||y_i - b|| over the rows y_i.
/// Starts from the row mean. The nearest row is tested against the vertex
/// optimality condition at every step, so a median sitting on a data point
/// is reported with at_vertex = true instead of being approached slowly.
GeometricMedian geometric_median(const Eigen::Ref<const MatrixXd>& rows, double tol, int max_iter);

/// Default tolerance for geometric_median in projections: 1e-12 (1 + mean row norm).
double default_median_tol(const Eigen::Ref<const MatrixXd>& rows);

/// Metric projection of Y onto B(n,r) when the geometric median of the rows is
/// not a data point: normalize_rows(Y - e b^T). Returns nullopt otherwise.
std::optional<MatrixXd> project_onto_variety(const Eigen::Ref<const MatrixXd>& Y);

struct Retraction {
  VarietyPoint point;
  int backtracks = 0;
  double step_scale = 1.0;  // H was scaled by this factor
};

/// Proj_B(R + H). When the projection is not available (median at a vertex)
/// H is divided by sigma and retried, up to max_backtracks times.
/// Throws RetractionError when the budget is exhausted.
Retraction retract(const VarietyPoint& base, const TangentVector& H, double sigma = 2.0, int max_backtracks = 30);

/// sgn(u) for the top left singular vector u (first nonzero entry positive).
VectorXd round_signs(const VarietyPoint& p);

/// Round(R) = sgn(u) e_1^T when sgn(u) is a balanced sign vector with no
/// zero entries; nullopt ("not in the variety") otherwise, always for odd n.
std::optional<SingularPoint> round_to_singular(const VarietyPoint& p, double delta);

/// [0, H1] is in the tangent cone at a e_1^T: first column ~ 0, e^T H1 ~ 0 and
/// a^T diag(H1 H1^T) ~ 0. Conditions are checked to tol (1 + ||H||^2).
bool tangent_cone_member(const SingularPoint& a, const Eigen::Ref<const MatrixXd>& H, double tol);

/// Second-order tangent set membership of W for direction H at a e_1^T.
bool second_tangent_member(const SingularPoint& a, const Eigen::Ref<const MatrixXd>& H,
                           const Eigen::Ref<const MatrixXd>& W, double tol);

/// Random normal n x r draw projected onto B(n,r); redraws up to max_draws
/// times when the projection is unavailable.
VarietyPoint random_point(Eigen::Index n, Eigen::Index r, std::uint64_t seed, int max_draws = 10);

}  // namespace varsdp
