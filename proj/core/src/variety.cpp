#include "varsdp/variety.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace varsdp {

const ThinSVD& VarietyPoint::svd() const {
  if (!svd_) svd_ = thin_svd(R_);
  return *svd_;
}

double VarietyPoint::row_norm_residual() const {
  return (R_.rowwise().squaredNorm().array() - 1.0).abs().maxCoeff();
}

double VarietyPoint::column_sum_residual() const {
  return R_.colwise().sum().cwiseAbs().maxCoeff();
}

bool VarietyPoint::is_feasible(double tol) const {
  return row_norm_residual() <= tol &&
         column_sum_residual() <= tol * std::sqrt(static_cast<double>(n()));
}

MatrixXd SingularPoint::factor(Eigen::Index r) const {
  MatrixXd R = MatrixXd::Zero(a.size(), r);
  R.col(0) = a;
  return R;
}

bool is_singular(const VarietyPoint& p, double delta) {
  const double s = p.spectral_norm();
  const double n = static_cast<double>(p.n());
  // Closed condition; the slack absorbs rounding in s^2 on the boundary.
  return s * s >= (1.0 - delta) * n * (1.0 - 1e-12);
}

VectorXd diag_multiplier(const VarietyPoint& base, const Eigen::Ref<const MatrixXd>& C) {
  const MatrixXd& R = base.factor();
  const double n = static_cast<double>(R.rows());
  if (C.rows() != R.rows() || C.cols() != R.cols()) {
    throw std::invalid_argument("diag_multiplier: shape mismatch");
  }
  // diag(J C R^T) row by row.
  VectorXd d = center_apply(C).cwiseProduct(R).rowwise().sum();

  MatrixXd G = MatrixXd::Identity(R.cols(), R.cols()) - R.transpose() * R / n;
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(G);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  const double condition = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
  if (!(condition <= 1e10)) throw NearSingularError(condition);

  VectorXd t = R.transpose() * d;
  t = es.eigenvectors() * (es.eigenvectors().transpose() * t).cwiseQuotient(es.eigenvalues());
  return d + R * t / n;
}

TangentVector project_tangent(const VarietyPoint& base, const Eigen::Ref<const MatrixXd>& C) {
  VectorXd lambda = diag_multiplier(base, C);
  MatrixXd H = C - lambda.asDiagonal() * base.factor();
  return TangentVector{center_apply(H)};
}

MatrixXd normalize_rows(const Eigen::Ref<const MatrixXd>& Y) {
  VectorXd norms = Y.rowwise().norm();
  if (norms.size() && norms.minCoeff() < 1e-14) throw std::invalid_argument("normalize_rows: zero row");
  return norms.cwiseInverse().asDiagonal() * Y;
}

namespace {

// sum over rows j != i (and not coincident with row i) of unit vectors
// (y_i - y_j) / ||y_i - y_j||; also returns the multiplicity of row i.
std::pair<VectorXd, int> vertex_pull(const Eigen::Ref<const MatrixXd>& Y, Eigen::Index i) {
  VectorXd pull = VectorXd::Zero(Y.cols());
  int multiplicity = 0;
  for (Eigen::Index j = 0; j < Y.rows(); ++j) {
    VectorXd diff = Y.row(i) - Y.row(j);
    const double d = diff.norm();
    if (d == 0.0) {
      ++multiplicity;
      continue;
    }
    pull += diff / d;
  }
  return {pull, multiplicity};
}

VectorXd random_direction(Eigen::Index dim, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  VectorXd v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v(i) = normal(rng);
  return v.normalized();
}

}  // namespace

double default_median_tol(const Eigen::Ref<const MatrixXd>& rows) {
  return 1e-12 * (1.0 + rows.rowwise().norm().mean());
}

namespace {

struct MedianCost {
  double value;
  double grad_norm;
};

MedianCost median_cost(const Eigen::Ref<const MatrixXd>& Y, const VectorXd& b) {
  MatrixXd D = Y.rowwise() - b.transpose();
  VectorXd dist = D.rowwise().norm();
  VectorXd grad = VectorXd::Zero(b.size());
  for (Eigen::Index i = 0; i < D.rows(); ++i)
    if (dist(i) > 0.0) grad -= D.row(i).transpose() / dist(i);
  return MedianCost{dist.sum(), grad.norm()};
}

// Newton step on sum_i ||b - y_i|| with Hessian sum_i (I - u_i u_i^T) / d_i.
// Accepted when the cost drops, or holds to rounding while the gradient
// shrinks; nullopt sends the caller back to the Weiszfeld update.
std::optional<VectorXd> newton_median_step(const Eigen::Ref<const MatrixXd>& Y, const VectorXd& b, const MatrixXd& D,
                                           const VectorXd& dist, const VectorXd& grad) {
  const Eigen::Index dim = Y.cols();
  MatrixXd Hess = MatrixXd::Zero(dim, dim);
  for (Eigen::Index i = 0; i < D.rows(); ++i) {
    const VectorXd u = D.row(i).transpose() / dist(i);
    Hess.noalias() += (MatrixXd::Identity(dim, dim) - u * u.transpose()) / dist(i);
  }
  Eigen::LDLT<MatrixXd> ldlt(Hess);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) return std::nullopt;
  VectorXd step = -ldlt.solve(grad);
  if (!step.allFinite()) return std::nullopt;

  const double cost0 = dist.sum(), grad0 = grad.norm();
  const double slack = 4.0 * std::numeric_limits<double>::epsilon() * cost0;
  for (int half = 0; half < 8; ++half, step *= 0.5) {
    VectorXd trial = b + step;
    MedianCost c = median_cost(Y, trial);
    if (c.value < cost0 - slack || (c.value <= cost0 + slack && c.grad_norm < 0.5 * grad0)) return trial;
  }
  return std::nullopt;
}

}  // namespace

GeometricMedian geometric_median(const Eigen::Ref<const MatrixXd>& Y, double tol, int max_iter) {
  const Eigen::Index n = Y.rows(), dim = Y.cols();
  if (n < 1) throw std::invalid_argument("geometric_median: no points");
  // The gradient is a sum of n unit vectors; it cannot be resolved below
  // rounding level.
  const double eff_tol = std::max(tol, 8.0 * std::numeric_limits<double>::epsilon() * static_cast<double>(n));
  std::mt19937_64 rng(0x9e3779b97f4a7c15ULL);

  GeometricMedian out;
  VectorXd b = Y.colwise().mean().transpose();
  const double scale = 1.0 + Y.rowwise().norm().mean();
  if (((Y.rowwise() - b.transpose()).rowwise().norm()).minCoeff() <= 1e-12 * scale) {
    b += 1e-8 * scale * random_direction(dim, rng);
  }

  VectorXd dist(n);
  for (int it = 0; it <= max_iter; ++it) {
    out.iterations = it;
    MatrixXd D = Y.rowwise() - b.transpose();
    dist = D.rowwise().norm();
    Eigen::Index nearest = 0;
    const double dmin = dist.minCoeff(&nearest);

    VectorXd grad = VectorXd::Zero(dim);
    double inv_sum = 0.0;
    VectorXd weighted = VectorXd::Zero(dim);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (dist(i) == 0.0) continue;
      const double w = 1.0 / dist(i);
      grad -= w * D.row(i).transpose();
      weighted += w * Y.row(i).transpose();
      inv_sum += w;
    }
    out.gradient_norm = grad.norm();
    if (dmin > 0.0 && out.gradient_norm <= eff_tol) {
      out.b = b;
      out.converged = true;
      return out;
    }

    // Only rows close to the iterate can be the median; test the nearest.
    if (dmin <= 1e-2 * dist.mean() || it == max_iter) {
      auto [pull, mult] = vertex_pull(Y, nearest);
      if (pull.norm() <= static_cast<double>(mult)) {
        out.b = Y.row(nearest).transpose();
        out.at_vertex = true;
        out.converged = true;
        out.gradient_norm = 0.0;
        return out;
      }
    }
    if (it == max_iter) break;

    if (dmin == 0.0) {
      b += 1e-8 * scale * random_direction(dim, rng);
      continue;
    }
    // Weiszfeld is linear and crawls when the rows sit in two tight clusters
    // (the cost is nearly flat along the line joining them). Try a Newton
    // step on the smooth cost first.
    if (auto nb = newton_median_step(Y, b, D, dist, grad)) {
      b = *nb;
      continue;
    }
    b = weighted / inv_sum;
  }
  out.b = b;
  out.converged = false;
  return out;
}

std::optional<MatrixXd> project_onto_variety(const Eigen::Ref<const MatrixXd>& Y) {
  GeometricMedian gm = geometric_median(Y, default_median_tol(Y), 500);
  if (gm.at_vertex) return std::nullopt;
  const double n = static_cast<double>(Y.rows());
  if (gm.gradient_norm > 1e-10 * std::sqrt(n)) return std::nullopt;
  MatrixXd shifted = Y.rowwise() - gm.b.transpose();
  if (shifted.rowwise().norm().minCoeff() < 1e-14) return std::nullopt;
  return normalize_rows(shifted);
}

Retraction retract(const VarietyPoint& base, const TangentVector& H, double sigma, int max_backtracks) {
  if (!(sigma > 1.0)) throw std::invalid_argument("retract: sigma must exceed 1");
  if (!H.H.allFinite()) throw std::invalid_argument("retract: non-finite direction");
  double scale = 1.0;
  for (int bt = 0; bt <= max_backtracks; ++bt) {
    if (auto projected = project_onto_variety(base.factor() + scale * H.H)) {
      return Retraction{VarietyPoint(std::move(*projected)), bt, scale};
    }
    scale /= sigma;
  }
  throw RetractionError(max_backtracks);
}

VectorXd round_signs(const VarietyPoint& p) {
  VectorXd u = p.svd().U.col(0);
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    if (u(i) != 0.0) {
      if (u(i) < 0.0) u = -u;
      break;
    }
  }
  return u.unaryExpr([](double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); });
}

std::optional<SingularPoint> round_to_singular(const VarietyPoint& p, double delta) {
  if (!(delta > 0.0 && delta < 0.5)) throw std::invalid_argument("round_to_singular: delta must be in (0, 1/2)");
  if (p.n() % 2 != 0) return std::nullopt;
  if (p.svd().rank() == 0) return std::nullopt;
  VectorXd a = round_signs(p);
  if ((a.array() == 0.0).any() || a.sum() != 0.0) return std::nullopt;
  return SingularPoint{a};
}

bool tangent_cone_member(const SingularPoint& sp, const Eigen::Ref<const MatrixXd>& H, double tol) {
  const VectorXd& a = sp.a;
  if (H.rows() != a.size() || H.cols() < 2) return false;
  const double hn = H.norm();
  const double n = static_cast<double>(a.size());
  const auto H1 = H.rightCols(H.cols() - 1);
  if (H.col(0).norm() > tol * (1.0 + hn)) return false;
  if (H1.colwise().sum().norm() > tol * std::sqrt(n) * (1.0 + hn)) return false;
  const double quad = a.dot(H1.rowwise().squaredNorm());
  return std::abs(quad) <= tol * (1.0 + hn * hn);
}

bool second_tangent_member(const SingularPoint& sp, const Eigen::Ref<const MatrixXd>& H,
                           const Eigen::Ref<const MatrixXd>& W, double tol) {
  if (!tangent_cone_member(sp, H, tol)) return false;
  if (W.rows() != H.rows() || W.cols() != H.cols()) return false;
  const VectorXd& a = sp.a;
  const double n = static_cast<double>(a.size());
  const auto H1 = H.rightCols(H.cols() - 1);
  const auto W1 = W.rightCols(W.cols() - 1);
  const double hn = H.norm(), wn = W.norm();

  VectorXd first = -a.cwiseProduct(H1.rowwise().squaredNorm());
  if ((W.col(0) - first).norm() > tol * (1.0 + hn * hn)) return false;
  if (W1.colwise().sum().norm() > tol * std::sqrt(n) * (1.0 + wn)) return false;

  VectorXd lambda = H1.transpose() * a / n;
  const bool along_a = (H1 - a * lambda.transpose()).norm() <= tol * (1.0 + H1.norm());
  if (along_a) {
    return std::abs(a.dot(W1.rowwise().squaredNorm())) <= tol * (1.0 + wn * wn);
  }
  return std::abs(a.dot(H1.cwiseProduct(W1).rowwise().sum())) <= tol * (1.0 + hn * wn);
}

VarietyPoint random_point(Eigen::Index n, Eigen::Index r, std::uint64_t seed, int max_draws) {
  for (int draw = 0; draw < max_draws; ++draw) {
    std::mt19937_64 rng(seed + static_cast<std::uint64_t>(draw) * 0x632be59bd9b4e019ULL);
    std::normal_distribution<double> normal;
    MatrixXd Y(n, r);
    for (Eigen::Index j = 0; j < r; ++j)
      for (Eigen::Index i = 0; i < n; ++i) Y(i, j) = normal(rng);
    if (auto projected = project_onto_variety(Y)) return VarietyPoint(std::move(*projected));
  }
  throw RetractionError(max_draws);
}

}  // namespace varsdp
