#pragma once

#include "varsdp/bisection.hpp"
#include "varsdp/certify.hpp"
#include "varsdp/graph.hpp"

#include <cstdint>
#include <optional>

namespace varsdp {

struct ALMConfig {
  double inner_tol = 1e-6;
  int inner_max_iter = 200;
  double beta0 = 0.1;
  double beta_min = 0.1;
  double beta_max = 10.0;
  double tol = 1e-6;
  int max_outer = 400;
  int stall_limit = 30;  // outer steps without a new best KKT error
  std::uint64_t seed = 1;
  std::optional<Eigen::Index> r;  // default_rank(n, k) when empty
  EigConfig eig;

  void validate() const;
};

/// 1/2 <L, R R^T> + (1/(2 beta)) (||Pi_-(Z - beta (R^T R - alpha I))||^2 - ||Z||^2).
double aug_lagrangian_value(const Eigen::Ref<const MatrixXd>& R, const MatrixXd& Z, double beta, const Laplacian& L,
                            double alpha);

/// L R - 2 R Pi_-(Z - beta (R^T R - alpha I)).
MatrixXd aug_lagrangian_grad(const Eigen::Ref<const MatrixXd>& R, const MatrixXd& Z, double beta, const Laplacian& L,
                             double alpha);

/// Pi_+(alpha I - R^T R).
MatrixXd recover_slack_Y(const VarietyPoint& p, double alpha);

/// Updated beta from the primal and dual infeasibilities.
double update_penalty(double beta, double pfeas, double dfeas, const ALMConfig& cfg);

class AugLagrangianObjective final : public SmoothObjective {
 public:
  AugLagrangianObjective(const Laplacian& L, const MatrixXd& Z, double beta, double alpha)
      : L_(L), Z_(Z), beta_(beta), alpha_(alpha) {}
  double value(const MatrixXd& R) const override;
  MatrixXd gradient(const MatrixXd& R) const override;

 private:
  const Laplacian& L_;
  const MatrixXd& Z_;
  double beta_;
  double alpha_;
};

/// Algorithm for k >= 3 with alpha = n / (k - 1).
SolveReport solve_equipartition(const Laplacian& L, int k, const ALMConfig& cfg);
SolveReport solve_equipartition(const Laplacian& L, int k, VarietyPoint start, const ALMConfig& cfg);

}  // namespace varsdp
