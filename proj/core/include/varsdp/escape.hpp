#pragma once

#include "varsdp/graph.hpp"
#include "varsdp/variety.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <variant>

namespace varsdp {

/// Reduced problem at the singular point a e_1^T:
///   min <C_P, Y>  s.t.  <P^T Diag(a) P, Y> = 0,  <I, Y> = n,  Y psd,
/// with C_P = P^T (L - Diag(c)) P, c = (L a) o a, and P the n x (n-1)
/// orthonormal complement of e taken from a Householder reflector.
class EscapeProblem {
 public:
  EscapeProblem(const SingularPoint& a, const Laplacian& L);

  Eigen::Index n() const noexcept { return a_.size(); }
  const VectorXd& a() const noexcept { return a_; }
  const VectorXd& c() const noexcept { return c_; }
  const Laplacian& laplacian() const noexcept { return L_; }

  /// P X for X with n-1 rows.
  MatrixXd P_apply(const Eigen::Ref<const MatrixXd>& X) const;
  /// P^T V for V with n rows.
  MatrixXd Pt_apply(const Eigen::Ref<const MatrixXd>& V) const;
  /// (L - Diag(c)) V.
  MatrixXd shifted_cost(const Eigen::Ref<const MatrixXd>& V) const;
  /// C_P X and A X with A = P^T Diag(a) P.
  MatrixXd cost_apply(const Eigen::Ref<const MatrixXd>& X) const;
  MatrixXd constraint_apply(const Eigen::Ref<const MatrixXd>& X) const;

  /// lambda_min(C_P - y2 A) by Lanczos.
  double dual_function(double y2, double tol, int max_iter, std::uint64_t seed) const;

 private:
  VectorXd a_;
  const Laplacian& L_;
  VectorXd c_;
  VectorXd w_;  // reflector I - 2 w w^T / (w^T w) maps e/sqrt(n) to e_1
  double ww_;
};

EscapeProblem build_escape(const SingularPoint& a, const Laplacian& L);

struct EscapeSolution {
  double value = 0.0;     // <C_P, H H^T>
  MatrixXd H;             // (n-1) x r_esc, ||H||_F^2 = n
  double y2 = 0.0;        // multiplier of the Diag(a) constraint
  double infeasibility = 0.0;  // |<A, H H^T>| / n
  int iterations = 0;
  bool converged = false;
};

/// Burer-Monteiro augmented Lagrangian on the sphere ||H||_F^2 = n with the
/// Diag(a) constraint penalized. Stops early once the value is clearly
/// negative and the constraint holds to tol.
EscapeSolution solve_escape(const EscapeProblem& prob, Eigen::Index r_esc = 3, double tol = 1e-8,
                            std::uint64_t seed = 11);

struct CertifiedOptimal {
  double y1 = 0.0;
  double y2 = 0.0;
  VectorXd mu;  // c + y1 e + y2 a; L - Diag(mu) is psd on e-perp
  double complementarity = 0.0;  // |<L - Diag(mu), a a^T>| = n |y1|
};

struct EscapeDirection {
  MatrixXd H;      // n x (r-1), e^T H = 0, ||H||_F^2 = n
  double F = 0.0;  // 1/2 <(L - Diag(c)) H, H> < 0
};

struct EscapeUnresolved {
  std::string reason;
  double value = 0.0;
};

using EscapeOutcome = std::variant<CertifiedOptimal, EscapeDirection, EscapeUnresolved>;

/// Decides whether a a^T is optimal for the bisection SDP, returning a dual
/// certificate, or an escape direction of rank at most r-1.
EscapeOutcome certify_or_direction(const SingularPoint& a, const Laplacian& L, Eigen::Index r, double tol = 1e-8);

/// 1/2 <(L - Diag(c)) H, H>.
double escape_curvature(const SingularPoint& a, const Laplacian& L, const Eigen::Ref<const MatrixXd>& H);

/// The curve [a - t^2/2 a o diag(H H^T), t H] before projection.
MatrixXd escape_curve(const SingularPoint& a, const Eigen::Ref<const MatrixXd>& H, double t);

struct EscapeStep {
  VarietyPoint point;
  double t = 0.0;
  double f = 0.0;
};

/// Projects the curve at t = 1, 1/2, ... until f drops below f_ref by at
/// least |F(H)| t^2 / 2 and the result has rank >= 2. f_ref is the value at
/// a e_1^T. nullopt when t falls below 1e-8. Throws std::invalid_argument if
/// F(H) >= 0.
std::optional<EscapeStep> escape_step(const SingularPoint& a, const Eigen::Ref<const MatrixXd>& H,
                                      const Laplacian& L, double f_ref);

}  // namespace varsdp
