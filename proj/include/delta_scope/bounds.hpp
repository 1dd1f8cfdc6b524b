#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <string_view>
#include <vector>

#include "delta_scope/dataset.hpp"
#include "delta_scope/solver.hpp"
#include "delta_scope/sparse.hpp"

namespace delta_scope {

/// Which certificate produced a ball.
enum class BallSource {
  /// Built from the exact old optimum and the gradients of the changed rows.
  OldOptimum,
  /// Built from any iterate of the new problem and its objective gradient.
  GradientIterate,
};

/// Closed ball {beta : ||beta - center|| <= radius} certified to contain the
/// optimum of the updated problem.
struct SolutionBall {
  DenseVector center;
  double radius = 0.0;
  BallSource source = BallSource::OldOptimum;

  std::size_t dim() const noexcept { return center.size(); }
};

enum class BoundMethod { OldOptimumBall, GradientBall, NaiveBox };

std::string_view to_string(BoundMethod method);

/// Interval [lower, upper] for a linear score eta^T beta_new.
struct ScoreBounds {
  double lower = 0.0;
  double upper = 0.0;
  double eta_norm = 0.0;
  BoundMethod method = BoundMethod::OldOptimumBall;

  double width() const noexcept { return upper - lower; }
};

/// Coefficient interval stored as center +- half_width so that every
/// coefficient of one ball reports the same width bit for bit.
struct CoefficientInterval {
  double center = 0.0;
  double half_width = 0.0;

  double lower() const noexcept { return center - half_width; }
  double upper() const noexcept { return center + half_width; }
  double width() const noexcept { return 2.0 * half_width; }
};

/// Counts and averaged gradient difference of an add/remove update.
struct UpdateStats {
  std::size_t n_old = 0;
  std::size_t n_new = 0;
  std::size_t n_added = 0;
  std::size_t n_removed = 0;
  /// (1/(n_A+n_R)) (sum_A grad l_i(beta_old) - sum_R grad l_i(beta_old)); zero
  /// for an empty update.
  DenseVector delta_s;
  /// False when the old model's residual exceeds kExactResidualThreshold, i.e.
  /// the old-optimum ball is not guaranteed.
  bool old_model_exact = true;
};

enum class Label { Plus, Minus, Unknown };

std::string_view to_string(Label label);

struct LabelDecision {
  Label label = Label::Unknown;
  ScoreBounds bounds;
};

/// Cost O((n_A + n_R) * d). `old.n_train` is n_old.
UpdateStats compute_delta_s(const TrainedModel& old, std::span<const Instance> added,
                            std::span<const Instance> removed);
/// Convenience overload resolving plan.removed against `base`.
UpdateStats compute_delta_s(const TrainedModel& old, const SparseDataset& base, const UpdatePlan& plan);

/// center = ((n_old + n_new) / (2 n_new)) beta_old - ((n_A + n_R) / (2 lambda n_new)) delta_s
/// radius = 0.5 || ((n_A - n_R) / n_new) beta_old + ((n_A + n_R) / (lambda n_new)) delta_s ||
SolutionBall old_optimum_ball(const TrainedModel& old, const UpdateStats& stats);

/// Ball around any candidate of the new problem:
/// center = candidate - g / (2 lambda), radius = ||g|| / (2 lambda).
SolutionBall gradient_ball(std::span<const double> candidate, std::span<const double> gradient, double lambda);

/// [eta^T m - ||eta|| r, eta^T m + ||eta|| r].
ScoreBounds score_bounds(const SolutionBall& ball, std::span<const double> eta);
/// Sparse direction eta = scale * x; O(nnz(x)).
ScoreBounds score_bounds(const SolutionBall& ball, SparseRow x, double scale = 1.0);

/// Per-coordinate bounds (eta = e_j); all share width 2r.
std::vector<CoefficientInterval> coefficient_bounds(const SolutionBall& ball);

/// Upper bound on ||beta_new - beta_old||_q. Pass
/// std::numeric_limits<double>::infinity() for the max norm.
double norm_change_bound(const TrainedModel& old, std::span<const CoefficientInterval> coef, double q);

/// Score bounds from the coefficient box alone; never tighter than the ball.
ScoreBounds naive_score_bounds(std::span<const CoefficientInterval> coef, std::span<const double> eta);

/// Plus if lower > 0, Minus if upper < 0, otherwise Unknown.
LabelDecision decide(const ScoreBounds& bounds);
LabelDecision classify_with_bounds(const SolutionBall& ball, SparseRow x);

}  // namespace delta_scope
