#pragma once

#include "varsdp/certify.hpp"
#include "varsdp/graph.hpp"
#include "varsdp/variety.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace varsdp {

enum class BBVariant { BB1, BB2 };

struct BBConfig {
  double gamma = 1e-4;     // sufficient decrease
  double eps_bb = 1e-10;   // BB scalar must lie in [eps, 1/eps]
  double sigma_ls = 0.5;   // step shrink factor
  int M = 5;               // nonmonotone memory
  double tol = 1e-6;       // ||grad|| / (1 + ||R||_F)
  int max_iter = 20000;    // total inner iterations
  int max_ls = 60;         // halvings per line search
  std::uint64_t seed = 1;
  double delta0 = 0.02;
  BBVariant variant = BBVariant::BB1;
  bool rank_adapt = true;
  int rank_period = 10;
  double rank_ratio = 10.0;
  int max_events = 50;     // round/escape events in solve_bisection
  std::optional<Eigen::Index> r;  // default_rank(n, 2) when empty
  EigConfig eig;

  /// Throws std::invalid_argument when a field is out of range.
  void validate() const;
};

/// k - 1 + ceil(sqrt(2 (n + 1))).
int default_rank(int n, int k);

/// BB scalar alpha for the step tau = 1/alpha. `g` is the previous gradient
/// moved to the new point and y = g_new - g. Returns +inf when the BB2
/// denominator vanishes. Throws std::invalid_argument if <g, g> = 0.
double bb_step(const Eigen::Ref<const MatrixXd>& g, const Eigen::Ref<const MatrixXd>& y, double tau_prev,
               BBVariant variant);

/// Fallback BB scalar from the gradient norm: 1 above 1, 1/||g|| in
/// [1e-5, 1], 1e5 below 1e-5.
double beta_fallback(double grad_norm);

/// Objective on B(n,r) with its Euclidean gradient.
class SmoothObjective {
 public:
  virtual ~SmoothObjective() = default;
  virtual double value(const MatrixXd& R) const = 0;
  virtual MatrixXd gradient(const MatrixXd& R) const = 0;
};

/// f(R) = 1/2 <L, R R^T>, gradient L R.
class BisectionObjective final : public SmoothObjective {
 public:
  explicit BisectionObjective(const Laplacian& L) : L_(L) {}
  double value(const MatrixXd& R) const override;
  MatrixXd gradient(const MatrixXd& R) const override;

 private:
  const Laplacian& L_;
};

enum class SmoothStatus { Converged, HitSingular, MaxIter, LineSearchFailed };

struct SmoothResult {
  VarietyPoint point;
  double f = 0.0;
  double grad_rel = 0.0;  // ||grad|| / (1 + ||R||_F) at point
  int iterations = 0;
  SmoothStatus status = SmoothStatus::MaxIter;
  std::vector<RankDrop> rank_drops;
};

/// Riemannian BB with nonmonotone line search from a feasible start. With
/// delta set, stops as soon as an iterate lies in B^{delta+} (or the start
/// does). Rank adaptation follows cfg.rank_adapt.
SmoothResult solve_smooth(const SmoothObjective& obj, VarietyPoint start, const BBConfig& cfg,
                          std::optional<double> delta, int max_iter);

/// Index after which to truncate sigma (keep that many columns), or nullopt
/// when no ratio sigma_i / sigma_{i+1} exceeds `ratio` or the cut would keep
/// every column. Zero trailing values count as an infinite ratio. The kept
/// count is never below 2.
std::optional<Eigen::Index> rank_cut(const VectorXd& sigma, Eigen::Index r, double ratio);

/// Truncates R at rank_cut and projects the result back onto B(n, r').
/// nullopt when no cut applies or the projection is unavailable.
std::optional<VarietyPoint> rank_adapt(const VarietyPoint& p, double ratio = 10.0);

/// Full bisection solve from a random start drawn with cfg.seed.
SolveReport solve_bisection(const Laplacian& L, const BBConfig& cfg);
/// Same from a given feasible start.
SolveReport solve_bisection(const Laplacian& L, VarietyPoint start, const BBConfig& cfg);

}  // namespace varsdp
