#include "varsdp/alm.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

namespace varsdp {

void ALMConfig::validate() const {
  if (!(inner_tol > 0.0) || !(tol > 0.0)) throw std::invalid_argument("tolerances must be positive");
  if (inner_max_iter < 1 || max_outer < 1 || stall_limit < 1) throw std::invalid_argument("limits must be positive");
  if (!(beta_min > 0.0 && beta_min <= beta0 && beta0 <= beta_max)) {
    throw std::invalid_argument("need 0 < beta_min <= beta0 <= beta_max");
  }
  if (r && *r < 2) throw std::invalid_argument("rank must be at least 2");
}

namespace {

MatrixXd bound_gap(const Eigen::Ref<const MatrixXd>& R, double alpha) {
  MatrixXd G = R.transpose() * R;
  G.diagonal().array() -= alpha;
  return G;
}

MatrixXd symmetrized(MatrixXd M) { return 0.5 * (M + M.transpose()); }

}  // namespace

double aug_lagrangian_value(const Eigen::Ref<const MatrixXd>& R, const MatrixXd& Z, double beta, const Laplacian& L,
                            double alpha) {
  if (!(beta > 0.0)) throw std::invalid_argument("beta must be positive");
  MatrixXd W = project_nsd(symmetrized(Z - beta * bound_gap(R, alpha)));
  return 0.5 * R.cwiseProduct(L.apply(R)).sum() + (W.squaredNorm() - Z.squaredNorm()) / (2.0 * beta);
}

MatrixXd aug_lagrangian_grad(const Eigen::Ref<const MatrixXd>& R, const MatrixXd& Z, double beta, const Laplacian& L,
                             double alpha) {
  if (!(beta > 0.0)) throw std::invalid_argument("beta must be positive");
  MatrixXd W = project_nsd(symmetrized(Z - beta * bound_gap(R, alpha)));
  return L.apply(R) - 2.0 * R * W;
}

MatrixXd recover_slack_Y(const VarietyPoint& p, double alpha) {
  return project_psd(symmetrized(-bound_gap(p.factor(), alpha)));
}

double update_penalty(double beta, double pfeas, double dfeas, const ALMConfig& cfg) {
  if (pfeas < dfeas / 1000.0) return std::max(beta / 1.2, cfg.beta_min);
  if (pfeas >= std::max(dfeas / 1000.0, 10.0 * cfg.tol)) return std::min(1.2 * beta, cfg.beta_max);
  return beta;
}

double AugLagrangianObjective::value(const MatrixXd& R) const {
  return aug_lagrangian_value(R, Z_, beta_, L_, alpha_);
}

MatrixXd AugLagrangianObjective::gradient(const MatrixXd& R) const {
  return aug_lagrangian_grad(R, Z_, beta_, L_, alpha_);
}

SolveReport solve_equipartition(const Laplacian& L, int k, const ALMConfig& cfg) {
  cfg.validate();
  const int n = L.n();
  if (k < 3) throw std::invalid_argument("solve_equipartition: k must be at least 3");
  const Eigen::Index r = std::min<Eigen::Index>(cfg.r.value_or(default_rank(n, k)), n);
  return solve_equipartition(L, k, random_point(n, std::max<Eigen::Index>(r, 2), cfg.seed), cfg);
}

SolveReport solve_equipartition(const Laplacian& L, int k, VarietyPoint start, const ALMConfig& cfg) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const int n = L.n();
  if (k < 3) throw std::invalid_argument("solve_equipartition: k must be at least 3");
  if (start.n() != n) throw std::invalid_argument("solve_equipartition: start has wrong size");
  if (!start.is_feasible(1e-8)) throw std::invalid_argument("solve_equipartition: infeasible start");

  SolveReport rep;
  rep.kind = ProblemKind::Equipartition;
  rep.n = n;
  rep.k = k;
  rep.r_initial = start.r();
  rep.seed = cfg.seed;
  rep.alpha = static_cast<double>(n) / (k - 1);
  const double alpha = rep.alpha;

  BBConfig inner;
  inner.tol = cfg.inner_tol;
  inner.seed = cfg.seed;
  inner.rank_adapt = false;

  VarietyPoint R = std::move(start);
  const Eigen::Index r = R.r();
  MatrixXd Z = MatrixXd::Zero(r, r);
  double beta = cfg.beta0;
  double best_err = std::numeric_limits<double>::infinity();
  int since_best = 0;
  rep.termination = Termination::MaxIterations;

  for (int outer = 0; outer < cfg.max_outer; ++outer) {
    AugLagrangianObjective obj(L, Z, beta, alpha);
    SmoothResult res = solve_smooth(obj, std::move(R), inner, std::nullopt, cfg.inner_max_iter);
    rep.inner_iterations += res.iterations;
    ++rep.outer_iterations;
    R = std::move(res.point);

    const MatrixXd& F = R.factor();
    Z = project_nsd(symmetrized(Z - beta * bound_gap(F, alpha)));
    MatrixXd Y = recover_slack_Y(R, alpha);

    const double rnorm = F.norm(), ynorm = Y.norm(), znorm = Z.norm();
    rep.pfeas = project_psd(symmetrized(bound_gap(F, alpha))).norm() / (1.0 + ynorm + rnorm);
    MatrixXd grad = project_tangent(R, L.apply(F) - 2.0 * F * Z).H;
    const double d1 = grad.norm() / (1.0 + rnorm + znorm);
    const double d2 = (Y - project_psd(symmetrized(Y + Z))).norm() / (1.0 + ynorm + znorm);
    rep.dfeas = std::max(d1, d2);

    if (rep.pfeas <= cfg.tol && rep.dfeas <= cfg.tol) {
      rep.termination = Termination::Converged;
      break;
    }
    const double err = std::max(rep.pfeas, rep.dfeas);
    if (err < 0.99 * best_err) {
      best_err = err;
      since_best = 0;
    } else if (++since_best >= cfg.stall_limit) {
      rep.termination = Termination::Stalled;
      break;
    }
    beta = update_penalty(beta, rep.pfeas, rep.dfeas, cfg);
  }

  rep.beta_final = beta;
  rep.Z = Z;
  rep.factor = R.factor();
  rep.r_final = R.r();
  rep.obj = R.factor().cwiseProduct(L.apply(R.factor())).sum();
  rep.f = 0.5 * rep.obj;
  try {
    // A tol-level KKT point only pins active singular values to about tol of
    // the bound, so the split threshold follows the tolerance.
    rep.cert = residues_equipartition(R, Z, L, alpha, cfg.eig, std::max(kDefaultTauAlpha, 10.0 * cfg.tol));
  } catch (const NearSingularError&) {
    rep.flags.push_back("dual recovery ill-conditioned");
    rep.cert.Rd = rep.cert.Rc = rep.cert.Rp = std::numeric_limits<double>::infinity();
  }
  if (!rep.cert.eig_converged) rep.flags.push_back("eigensolver did not converge");
  if (!rep.terminated_ok()) rep.flags.push_back(std::string("terminated: ") + std::string(to_string(rep.termination)));
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

}  // namespace varsdp
