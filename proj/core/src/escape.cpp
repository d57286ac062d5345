#include "varsdp/escape.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <deque>
#include <random>

namespace varsdp {

EscapeProblem::EscapeProblem(const SingularPoint& a, const Laplacian& L) : a_(a.a), L_(L) {
  const Eigen::Index n = a_.size();
  if (n != L.n()) throw std::invalid_argument("escape: sign vector has wrong length");
  if (n % 2 != 0) throw std::invalid_argument("escape: n must be even");
  if ((a_.array().abs() != 1.0).any() || a_.sum() != 0.0) {
    throw std::invalid_argument("escape: a must be a balanced sign vector");
  }
  c_ = L.apply_vector(a_).cwiseProduct(a_);
  w_ = VectorXd::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
  w_(0) -= 1.0;
  ww_ = w_.squaredNorm();
}

MatrixXd EscapeProblem::P_apply(const Eigen::Ref<const MatrixXd>& X) const {
  const Eigen::Index n = a_.size();
  if (X.rows() != n - 1) throw std::invalid_argument("P_apply: shape mismatch");
  MatrixXd V(n, X.cols());
  V.row(0).setZero();
  V.bottomRows(n - 1) = X;
  Eigen::RowVectorXd proj = (w_.transpose() * V) * (2.0 / ww_);
  V.noalias() -= w_ * proj;
  return V;
}

MatrixXd EscapeProblem::Pt_apply(const Eigen::Ref<const MatrixXd>& V) const {
  const Eigen::Index n = a_.size();
  if (V.rows() != n) throw std::invalid_argument("Pt_apply: shape mismatch");
  Eigen::RowVectorXd proj = (w_.transpose() * V) * (2.0 / ww_);
  MatrixXd QV = V - w_ * proj;
  return QV.bottomRows(n - 1);
}

MatrixXd EscapeProblem::shifted_cost(const Eigen::Ref<const MatrixXd>& V) const {
  return L_.apply(V) - c_.asDiagonal() * V;
}

MatrixXd EscapeProblem::cost_apply(const Eigen::Ref<const MatrixXd>& X) const {
  return Pt_apply(shifted_cost(P_apply(X)));
}

MatrixXd EscapeProblem::constraint_apply(const Eigen::Ref<const MatrixXd>& X) const {
  return Pt_apply(a_.asDiagonal() * P_apply(X));
}

double EscapeProblem::dual_function(double y2, double tol, int max_iter, std::uint64_t seed) const {
  auto apply = [&](const Eigen::Ref<const VectorXd>& x, Eigen::Ref<VectorXd> y) {
    VectorXd Px = P_apply(x);
    y = Pt_apply(shifted_cost(Px) - y2 * a_.cwiseProduct(Px));
  };
  return lanczos_min_eig(apply, n() - 1, tol, max_iter, seed).value;
}

EscapeProblem build_escape(const SingularPoint& a, const Laplacian& L) { return EscapeProblem(a, L); }

namespace {

// Upper bound on ||L - Diag(c)||_2.
double cost_bound(const EscapeProblem& prob) {
  const auto& M = prob.laplacian().matrix();
  double deg = 0.0;
  for (Eigen::Index i = 0; i < M.rows(); ++i) deg = std::max(deg, M.coeff(i, i));
  return 2.0 * deg + prob.c().cwiseAbs().maxCoeff();
}

MatrixXd sphere(MatrixXd H, double radius2) {
  const double nrm = H.norm();
  return H * (std::sqrt(radius2) / nrm);
}

}  // namespace

EscapeSolution solve_escape(const EscapeProblem& prob, Eigen::Index r_esc, double tol, std::uint64_t seed) {
  if (r_esc < 1) throw std::invalid_argument("solve_escape: r_esc must be positive");
  const Eigen::Index m = prob.n() - 1;
  const double n = static_cast<double>(prob.n());
  const Eigen::Index p = std::min(r_esc, m);
  const double cnorm = std::max(1.0, cost_bound(prob));

  EscapeSolution out;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  MatrixXd H(m, p);
  for (Eigen::Index j = 0; j < p; ++j)
    for (Eigen::Index i = 0; i < m; ++i) H(i, j) = normal(rng);
  H = sphere(std::move(H), n);

  double y = 0.0;
  double rho = cnorm / n;
  double prev_h = std::numeric_limits<double>::infinity();
  const int max_outer = 60, max_inner = 3000;

  for (int outer = 0; outer < max_outer; ++outer) {
    auto eval = [&](const MatrixXd& X, MatrixXd& CX, MatrixXd& AX, double& h) {
      CX = prob.cost_apply(X);
      AX = prob.constraint_apply(X);
      h = X.cwiseProduct(AX).sum();
      return X.cwiseProduct(CX).sum() - y * h + 0.5 * rho * h * h;
    };
    MatrixXd CH, AH;
    double h = 0.0;
    double phi = eval(H, CH, AH, h);
    auto rgrad = [&](const MatrixXd& X, const MatrixXd& CX, const MatrixXd& AX, double hx) {
      MatrixXd G = 2.0 * (CX - y * AX) + 2.0 * rho * hx * AX;
      return MatrixXd(G - (G.cwiseProduct(X).sum() / n) * X);
    };
    MatrixXd g = rgrad(H, CH, AH, h);
    double step = 1.0 / (2.0 * (cnorm + rho * n));
    std::deque<double> hist{phi};
    bool inner_ok = false;
    for (int it = 0; it < max_inner; ++it) {
      ++out.iterations;
      const double gg = g.squaredNorm();
      if (std::sqrt(gg) <= tol * cnorm * std::sqrt(n)) {
        inner_ok = true;
        break;
      }
      const double ref = *std::max_element(hist.begin(), hist.end());
      double tau = step;
      MatrixXd Hn, Cn, An;
      double hn = 0.0, phin = 0.0;
      bool accepted = false;
      for (int ls = 0; ls < 50; ++ls) {
        Hn = sphere(H - tau * g, n);
        phin = eval(Hn, Cn, An, hn);
        if (phin <= ref - 1e-4 * tau * gg) {
          accepted = true;
          break;
        }
        tau *= 0.5;
      }
      if (!accepted) break;
      MatrixXd gn = rgrad(Hn, Cn, An, hn);
      MatrixXd s = Hn - H;
      MatrixXd dy = gn - g;
      const double sy = s.cwiseProduct(dy).sum();
      step = sy > 0.0 ? s.squaredNorm() / sy : 1.0 / (2.0 * (cnorm + rho * n));
      step = std::clamp(step, 1e-12, 1e12);
      H = std::move(Hn);
      CH = std::move(Cn);
      AH = std::move(An);
      h = hn;
      phi = phin;
      g = std::move(gn);
      hist.push_back(phi);
      if (hist.size() > 6) hist.pop_front();
    }

    out.value = H.cwiseProduct(CH).sum();
    out.infeasibility = std::abs(h) / n;
    out.H = H;
    out.y2 = y;
    if (out.infeasibility <= tol && out.value <= -10.0 * tol * cnorm * n) {
      out.converged = true;
      return out;
    }
    if (out.infeasibility <= tol && inner_ok) {
      out.converged = true;
      return out;
    }
    y -= rho * h;
    out.y2 = y;
    if (std::abs(h) > 0.25 * prev_h) rho *= 10.0;
    prev_h = std::abs(h);
  }
  return out;
}

double escape_curvature(const SingularPoint& a, const Laplacian& L, const Eigen::Ref<const MatrixXd>& H) {
  VectorXd c = L.apply_vector(a.a).cwiseProduct(a.a);
  MatrixXd SH = L.apply(H) - c.asDiagonal() * H;
  return 0.5 * H.cwiseProduct(SH).sum();
}

MatrixXd escape_curve(const SingularPoint& a, const Eigen::Ref<const MatrixXd>& H, double t) {
  MatrixXd Y(a.a.size(), H.cols() + 1);
  Y.col(0) = a.a - 0.5 * t * t * a.a.cwiseProduct(H.rowwise().squaredNorm());
  Y.rightCols(H.cols()) = t * H;
  return Y;
}

std::optional<EscapeStep> escape_step(const SingularPoint& a, const Eigen::Ref<const MatrixXd>& H,
                                      const Laplacian& L, double f_ref) {
  const double F = escape_curvature(a, L, H);
  if (!(F < 0.0)) throw std::invalid_argument("escape_step: direction has nonnegative curvature");
  const double n = static_cast<double>(a.a.size());
  for (double t = 1.0; t >= 1e-8; t *= 0.5) {
    auto projected = project_onto_variety(escape_curve(a, H, t));
    if (!projected) continue;
    VarietyPoint p(std::move(*projected));
    const double s = p.spectral_norm();
    if (p.svd().rank() < 2 || s * s > n * (1.0 - 1e-10)) continue;
    const double f = 0.5 * p.factor().cwiseProduct(L.apply(p.factor())).sum();
    if (f_ref - f >= 0.5 * std::abs(F) * t * t) return EscapeStep{std::move(p), t, f};
  }
  return std::nullopt;
}

namespace {

std::optional<MatrixXd> truncate_direction(const EscapeProblem& prob, const MatrixXd& Hesc, Eigen::Index cols) {
  Eigen::JacobiSVD<MatrixXd> svd(Hesc, Eigen::ComputeThinU);
  const VectorXd& s = svd.singularValues();
  Eigen::Index rank = 0;
  while (rank < s.size() && s(rank) > 1e-8 * s(0)) ++rank;
  if (rank > cols) return std::nullopt;
  MatrixXd T = svd.matrixU().leftCols(rank) * s.head(rank).asDiagonal();
  T = sphere(std::move(T), static_cast<double>(prob.n()));
  MatrixXd H = MatrixXd::Zero(prob.n(), cols);
  H.leftCols(rank) = prob.P_apply(T);
  return H;
}

CertifiedOptimal make_certificate(const EscapeProblem& prob, double y1, double y2) {
  CertifiedOptimal co;
  co.y1 = y1;
  co.y2 = y2;
  co.mu = prob.c() + VectorXd::Constant(prob.n(), y1) + y2 * prob.a();
  co.complementarity = static_cast<double>(prob.n()) * std::abs(y1);
  return co;
}

}  // namespace

EscapeOutcome certify_or_direction(const SingularPoint& a, const Laplacian& L, Eigen::Index r, double tol) {
  if (r < 2) throw std::invalid_argument("certify_or_direction: r must exceed 1");
  EscapeProblem prob(a, L);
  const double n = static_cast<double>(prob.n());
  const double thr = tol * (1.0 + L.frobenius_norm());
  const double cnorm = std::max(1.0, cost_bound(prob));

  EscapeSolution sol = solve_escape(prob, 3, tol);
  if (sol.value < -thr) {
    std::optional<MatrixXd> H = truncate_direction(prob, sol.H, r - 1);
    if (!H) {
      EscapeSolution low = solve_escape(prob, r - 1, tol);
      if (low.value < -thr) H = truncate_direction(prob, low.H, r - 1);
    }
    if (!H) return EscapeUnresolved{"escape factor rank exceeds r - 1", sol.value};
    const double F = escape_curvature(a, L, *H);
    if (F < -1e-10) return EscapeDirection{std::move(*H), F};
    return EscapeUnresolved{"truncated direction lost negative curvature", sol.value};
  }

  // Weak duality: n * lambda_min(C_P - y2 A) <= value <= 0 for every y2.
  const int lanczos_steps = static_cast<int>(std::min<Eigen::Index>(prob.n() - 1, 400));
  const double eig_tol = 1e-12 * (1.0 + L.frobenius_norm());
  auto dual = [&](double y2) { return prob.dual_function(y2, eig_tol, lanczos_steps, 5); };

  double best_y2 = sol.y2;
  double best = dual(best_y2);
  if (n * best < -thr) {
    // The dual function is concave in y2; golden-section search on a bracket
    // containing every maximizer.
    double lo = std::min(best_y2, 0.0) - 3.0 * cnorm, hi = std::max(best_y2, 0.0) + 3.0 * cnorm;
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
    double f1 = dual(x1), f2 = dual(x2);
    for (int it = 0; it < 60 && n * std::max(f1, f2) < -thr; ++it) {
      if (f1 < f2) {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + g * (hi - lo);
        f2 = dual(x2);
      } else {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - g * (hi - lo);
        f1 = dual(x1);
      }
    }
    if (f1 > best) best = f1, best_y2 = x1;
    if (f2 > best) best = f2, best_y2 = x2;
  }
  if (n * best >= -thr) return make_certificate(prob, std::min(best, 0.0), best_y2);
  return EscapeUnresolved{"escape subproblem did not resolve", sol.value};
}

}  // namespace varsdp
