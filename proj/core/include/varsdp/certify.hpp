#pragma once

#include "varsdp/graph.hpp"
#include "varsdp/variety.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace varsdp {

/// Settings for the smallest-eigenvalue computations behind Rd.
struct EigConfig {
  double tol = 1e-10;   // residual tolerance, scaled by 1 + ||L||_F
  int max_iter = 600;   // Lanczos steps (capped at n)
  std::uint64_t seed = 7;
};

struct Certificate {
  VectorXd lambda;  // multiplier of diag(X) = e
  VectorXd mu;      // multiplier of R^T e = 0 (empty when not recovered)
  double Rp = 0.0;
  double Rd = 0.0;
  double Rc = 0.0;
  double eig_min = 0.0;           // smallest eigenvalue found for the centered slack
  bool eig_converged = true;
  Eigen::Index bound_width = 0;   // columns of U1 (equipartition only)
};

struct DualRecovery {
  VectorXd y;  // n
  VectorXd z;  // r
  double condition = 1.0;
};

/// Least-squares multipliers for a regular point: solves
///   [I R; R^T nI] [y; z] = (diag(R G^T), G^T e),  G = C_eff + Theta,
/// through the r x r Schur complement nI - R^T R. Throws NearSingularError
/// when that system has condition above 1e12.
DualRecovery recover_duals(const VarietyPoint& p, const Eigen::Ref<const MatrixXd>& Theta,
                           const Eigen::Ref<const MatrixXd>& C_eff);

/// Residues for the bisection SDP using the slack S = L - Diag(lambda).
Certificate residues_with_multiplier(const Eigen::Ref<const MatrixXd>& R, const Laplacian& L,
                                     const VectorXd& lambda, const EigConfig& eig = {});

/// Rp, Rd, Rc with lambda recovered from L R.
Certificate residues_bisection(const VarietyPoint& p, const Laplacian& L, const EigConfig& eig = {});

/// Residues for the k-equipartition SDP with spectral bound alpha; lambda is
/// recovered from L R - 2 R Z and the top block U1 of R (singular values with
/// s^2 >= alpha (1 - tau_alpha)) is deflated.
Certificate residues_equipartition(const VarietyPoint& p, const MatrixXd& Z, const Laplacian& L, double alpha,
                                   const EigConfig& eig = {}, double tau_alpha = kDefaultTauAlpha);

enum class ProblemKind { Bisection, Equipartition };

enum class Termination {
  Converged,
  CertifiedSingular,  // stopped at a rounded rank-one point proven optimal
  MaxIterations,
  LineSearchFailed,
  Stalled,
  TooManyEvents,
};

std::string_view to_string(ProblemKind k);
std::string_view to_string(Termination t);

struct RankDrop {
  int iteration = 0;
  Eigen::Index from = 0;
  Eigen::Index to = 0;
};

struct SolveReport {
  ProblemKind kind = ProblemKind::Bisection;
  int n = 0;
  int k = 2;
  Eigen::Index r_initial = 0;
  Eigen::Index r_final = 0;
  double obj = 0.0;  // <L, R R^T>
  double f = 0.0;    // obj / 2
  Certificate cert;
  int inner_iterations = 0;
  int outer_iterations = 0;
  int escapes = 0;
  int round_events = 0;
  std::vector<RankDrop> rank_drops;
  double delta_final = 0.0;
  double seconds = 0.0;
  Termination termination = Termination::MaxIterations;
  std::uint64_t seed = 0;
  std::vector<std::string> flags;
  MatrixXd factor;

  // equipartition only
  double alpha = 0.0;
  double beta_final = 0.0;
  double pfeas = 0.0;
  double dfeas = 0.0;
  MatrixXd Z;

  bool terminated_ok() const noexcept {
    return termination == Termination::Converged || termination == Termination::CertifiedSingular;
  }
  /// Normal termination, no flags, and every residue within the bounds.
  bool certified(double rp_tol, double rd_tol, double rc_tol) const noexcept {
    return terminated_ok() && flags.empty() && cert.Rp <= rp_tol && cert.Rd <= rd_tol && cert.Rc <= rc_tol;
  }
};

}  // namespace varsdp
