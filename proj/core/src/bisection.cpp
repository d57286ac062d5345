#include "varsdp/bisection.hpp"

#include "varsdp/escape.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <limits>

namespace varsdp {

void BBConfig::validate() const {
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must lie in (0, 1)");
  if (!(sigma_ls > 0.0 && sigma_ls < 1.0)) throw std::invalid_argument("sigma_ls must lie in (0, 1)");
  if (!(eps_bb > 0.0 && eps_bb < 1.0)) throw std::invalid_argument("eps_bb must lie in (0, 1)");
  if (M < 0) throw std::invalid_argument("M must be nonnegative");
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
  if (!(delta0 > 0.0 && delta0 < 0.5)) throw std::invalid_argument("delta0 must lie in (0, 1/2)");
  if (max_iter < 0 || max_ls < 1 || rank_period < 1 || max_events < 0) {
    throw std::invalid_argument("iteration limits must be positive");
  }
  if (!(rank_ratio > 1.0)) throw std::invalid_argument("rank_ratio must exceed 1");
  if (r && *r < 2) throw std::invalid_argument("rank must be at least 2");
}

int default_rank(int n, int k) {
  if (n < 2 || k < 2) throw std::invalid_argument("default_rank: need n >= 2 and k >= 2");
  const long target = 2L * (n + 1);
  long s = static_cast<long>(std::sqrt(static_cast<double>(target)));
  while (s * s < target) ++s;
  while (s > 0 && (s - 1) * (s - 1) >= target) --s;
  return k - 1 + static_cast<int>(s);
}

double bb_step(const Eigen::Ref<const MatrixXd>& g, const Eigen::Ref<const MatrixXd>& y, double tau_prev,
               BBVariant variant) {
  const double gg = g.squaredNorm();
  if (!(gg > 0.0)) throw std::invalid_argument("bb_step: zero gradient");
  const double gy = std::abs(g.cwiseProduct(y).sum());
  if (variant == BBVariant::BB1) return gy / (tau_prev * gg);
  if (gy == 0.0) return std::numeric_limits<double>::infinity();
  return y.squaredNorm() / (tau_prev * gy);
}

double beta_fallback(double grad_norm) {
  if (grad_norm > 1.0) return 1.0;
  if (grad_norm >= 1e-5) return 1.0 / grad_norm;
  return 1e5;
}

double BisectionObjective::value(const MatrixXd& R) const {
  return 0.5 * R.cwiseProduct(L_.apply(R)).sum();
}

MatrixXd BisectionObjective::gradient(const MatrixXd& R) const { return L_.apply(R); }

std::optional<Eigen::Index> rank_cut(const VectorXd& sigma, Eigen::Index r, double ratio) {
  VectorXd s = VectorXd::Zero(r);
  const Eigen::Index m = std::min<Eigen::Index>(r, sigma.size());
  s.head(m) = sigma.head(m);
  Eigen::Index best = -1;
  double best_q = 0.0;
  for (Eigen::Index i = 0; i + 1 < r; ++i) {
    if (!(s(i) > 0.0)) break;
    const double q = s(i + 1) > 0.0 ? s(i) / s(i + 1) : std::numeric_limits<double>::infinity();
    if (q > ratio && (best < 0 || q > best_q)) {
      best = i;
      best_q = q;
    }
  }
  if (best < 0) return std::nullopt;
  const Eigen::Index keep = std::max<Eigen::Index>(best + 1, 2);
  if (keep >= r) return std::nullopt;
  return keep;
}

std::optional<VarietyPoint> rank_adapt(const VarietyPoint& p, double ratio) {
  const MatrixXd& R = p.factor();
  Eigen::JacobiSVD<MatrixXd> svd(R, Eigen::ComputeThinV);
  auto keep = rank_cut(svd.singularValues(), R.cols(), ratio);
  if (!keep) return std::nullopt;
  MatrixXd truncated = R * svd.matrixV().leftCols(*keep);
  if (auto projected = project_onto_variety(truncated)) return VarietyPoint(std::move(*projected));
  return std::nullopt;
}

namespace {

double rel_norm(const MatrixXd& g, const VarietyPoint& p) { return g.norm() / (1.0 + p.factor().norm()); }

}  // namespace

SmoothResult solve_smooth(const SmoothObjective& obj, VarietyPoint start, const BBConfig& cfg,
                          std::optional<double> delta, int max_iter) {
  cfg.validate();
  SmoothResult out;
  VarietyPoint R = std::move(start);
  double f = obj.value(R.factor());

  auto finish = [&](SmoothStatus status, const MatrixXd* g) {
    out.status = status;
    out.f = f;
    out.grad_rel = g ? rel_norm(*g, R) : std::numeric_limits<double>::quiet_NaN();
    out.point = std::move(R);
    return std::move(out);
  };

  if (delta && is_singular(R, *delta)) return finish(SmoothStatus::HitSingular, nullptr);

  MatrixXd g;
  try {
    g = riemannian_gradient(R, obj.gradient(R.factor())).H;
  } catch (const NearSingularError&) {
    return finish(SmoothStatus::HitSingular, nullptr);
  }

  std::deque<double> history{f};
  double alpha = beta_fallback(g.norm());

  for (;;) {
    const double gg = g.squaredNorm();
    if (rel_norm(g, R) < cfg.tol) return finish(SmoothStatus::Converged, &g);
    if (out.iterations >= max_iter) return finish(SmoothStatus::MaxIter, &g);

    const double f_max = *std::max_element(history.begin(), history.end());
    double tau = 1.0 / alpha;
    std::optional<VarietyPoint> next;
    double f_next = 0.0;
    for (int ls = 0; ls < cfg.max_ls; ++ls) {
      if (auto projected = project_onto_variety(R.factor() - tau * g)) {
        f_next = obj.value(*projected);
        if (f_next <= f_max - cfg.gamma * tau * gg) {
          next.emplace(std::move(*projected));
          break;
        }
      }
      tau *= cfg.sigma_ls;
    }
    if (!next) return finish(SmoothStatus::LineSearchFailed, &g);

    ++out.iterations;
    MatrixXd g_next;
    MatrixXd g_moved;
    try {
      g_next = riemannian_gradient(*next, obj.gradient(next->factor())).H;
      g_moved = project_tangent(*next, g).H;
    } catch (const NearSingularError&) {
      R = std::move(*next);
      f = f_next;
      return finish(SmoothStatus::HitSingular, nullptr);
    }
    R = std::move(*next);
    f = f_next;
    history.push_back(f);
    while (static_cast<int>(history.size()) > cfg.M + 1) history.pop_front();
    if (delta && is_singular(R, *delta)) {
      g = std::move(g_next);
      return finish(SmoothStatus::HitSingular, &g);
    }

    MatrixXd y = g_next - g_moved;
    alpha = g_moved.squaredNorm() > 0.0 ? bb_step(g_moved, y, tau, cfg.variant)
                                        : std::numeric_limits<double>::infinity();
    g = std::move(g_next);
    if (!(alpha >= cfg.eps_bb && alpha <= 1.0 / cfg.eps_bb)) alpha = beta_fallback(g.norm());

    if (cfg.rank_adapt && out.iterations % cfg.rank_period == 0 && R.r() > 2) {
      if (auto cand = rank_adapt(R, cfg.rank_ratio)) {
        const double fc = obj.value(cand->factor());
        if (fc <= *std::max_element(history.begin(), history.end())) {
          try {
            MatrixXd gc = riemannian_gradient(*cand, obj.gradient(cand->factor())).H;
            out.rank_drops.push_back(RankDrop{out.iterations, R.r(), cand->r()});
            R = std::move(*cand);
            f = fc;
            g = std::move(gc);
            history.push_back(f);
            while (static_cast<int>(history.size()) > cfg.M + 1) history.pop_front();
            alpha = beta_fallback(g.norm());
          } catch (const NearSingularError&) {
            // keep the untruncated iterate
          }
        }
      }
    }
  }
}

SolveReport solve_bisection(const Laplacian& L, const BBConfig& cfg) {
  cfg.validate();
  const int n = L.n();
  const Eigen::Index r = std::min<Eigen::Index>(cfg.r.value_or(default_rank(n, 2)), n);
  return solve_bisection(L, random_point(n, std::max<Eigen::Index>(r, 2), cfg.seed), cfg);
}

SolveReport solve_bisection(const Laplacian& L, VarietyPoint start, const BBConfig& cfg) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  if (start.n() != L.n()) throw std::invalid_argument("solve_bisection: start has wrong size");
  if (!start.is_feasible(1e-8)) throw std::invalid_argument("solve_bisection: infeasible start");

  SolveReport rep;
  rep.kind = ProblemKind::Bisection;
  rep.n = L.n();
  rep.k = 2;
  rep.r_initial = start.r();
  rep.seed = cfg.seed;

  BisectionObjective obj(L);
  VarietyPoint point = std::move(start);
  double delta = cfg.delta0;
  bool singular_certified = false;
  std::optional<Certificate> singular_cert;

  for (;;) {
    const int budget = std::max(0, cfg.max_iter - rep.inner_iterations);
    SmoothResult res = solve_smooth(obj, std::move(point), cfg, delta, budget);
    for (RankDrop d : res.rank_drops) {
      d.iteration += rep.inner_iterations;
      rep.rank_drops.push_back(d);
    }
    rep.inner_iterations += res.iterations;
    point = std::move(res.point);

    if (res.status == SmoothStatus::Converged) {
      rep.termination = Termination::Converged;
      break;
    }
    if (res.status == SmoothStatus::MaxIter) {
      rep.termination = Termination::MaxIterations;
      break;
    }
    if (res.status == SmoothStatus::LineSearchFailed) {
      rep.termination = Termination::LineSearchFailed;
      break;
    }

    ++rep.round_events;
    ++rep.outer_iterations;
    if (rep.round_events > cfg.max_events) {
      rep.termination = Termination::TooManyEvents;
      break;
    }

    auto sp = round_to_singular(point, delta);
    if (sp) {
      EscapeOutcome outcome = certify_or_direction(*sp, L, point.r());
      if (auto* opt = std::get_if<CertifiedOptimal>(&outcome)) {
        MatrixXd factor = sp->factor(point.r());
        singular_cert = residues_with_multiplier(factor, L, opt->mu, cfg.eig);
        point = VarietyPoint(std::move(factor));
        singular_certified = true;
        rep.termination = Termination::CertifiedSingular;
        break;
      }
      if (auto* dir = std::get_if<EscapeDirection>(&outcome)) {
        const double f_sing = obj.value(sp->factor(1));
        auto step = escape_step(*sp, dir->H, L, f_sing);
        if (step && step->f < res.f) {
          point = std::move(step->point);
          ++rep.escapes;
        }
      }
    }
    delta /= 2.0;
  }

  rep.delta_final = delta;
  rep.factor = point.factor();
  rep.r_final = point.r();
  rep.obj = point.factor().cwiseProduct(L.apply(point.factor())).sum();
  rep.f = 0.5 * rep.obj;

  if (singular_certified) {
    rep.cert = *singular_cert;
  } else {
    try {
      rep.cert = residues_bisection(point, L, cfg.eig);
    } catch (const NearSingularError&) {
      rep.flags.push_back("dual recovery ill-conditioned");
      rep.cert.Rp = (point.factor().rowwise().squaredNorm().array() - 1.0).matrix().norm() /
                    (1.0 + std::sqrt(static_cast<double>(rep.n)));
      rep.cert.Rd = rep.cert.Rc = std::numeric_limits<double>::infinity();
    }
  }
  if (!rep.cert.eig_converged) rep.flags.push_back("eigensolver did not converge");
  if (!rep.terminated_ok()) rep.flags.push_back(std::string("terminated: ") + std::string(to_string(rep.termination)));

  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

}  // namespace varsdp
