#include "delta_scope/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "delta_scope/loss.hpp"

namespace delta_scope {

std::string_view to_string(BoundMethod method) {
  switch (method) {
    case BoundMethod::OldOptimumBall:
      return "old_optimum_ball";
    case BoundMethod::GradientBall:
      return "gradient_ball";
    case BoundMethod::NaiveBox:
      return "naive_box";
  }
  return "unknown";
}

std::string_view to_string(Label label) {
  switch (label) {
    case Label::Plus:
      return "+1";
    case Label::Minus:
      return "-1";
    case Label::Unknown:
      return "unknown";
  }
  return "unknown";
}

UpdateStats compute_delta_s(const TrainedModel& old, std::span<const Instance> added,
                            std::span<const Instance> removed) {
  if (removed.size() > old.n_train) {
    throw Error("cannot remove " + std::to_string(removed.size()) + " instances from a model trained on " +
                std::to_string(old.n_train));
  }
  UpdateStats stats;
  stats.n_old = old.n_train;
  stats.n_added = added.size();
  stats.n_removed = removed.size();
  stats.n_new = old.n_train + added.size() - removed.size();
  stats.delta_s.assign(old.dim(), 0.0);
  stats.old_model_exact = old.grad_residual <= kExactResidualThreshold;

  const std::size_t changed = added.size() + removed.size();
  if (changed == 0) {
    return stats;
  }
  for (const auto& inst : added) {
    axpy(dloss_dscore(old.kind, inst.y, dot(inst.x, old.beta)), inst.x, stats.delta_s);
  }
  for (const auto& inst : removed) {
    axpy(-dloss_dscore(old.kind, inst.y, dot(inst.x, old.beta)), inst.x, stats.delta_s);
  }
  const double inv = 1.0 / static_cast<double>(changed);
  for (auto& v : stats.delta_s) v *= inv;
  return stats;
}

UpdateStats compute_delta_s(const TrainedModel& old, const SparseDataset& base, const UpdatePlan& plan) {
  if (base.dim() != old.dim()) {
    throw DimensionError("dataset dimension " + std::to_string(base.dim()) + " differs from model dimension " +
                         std::to_string(old.dim()));
  }
  const auto removed = removed_instances(base, plan);
  return compute_delta_s(old, plan.added, removed);
}

SolutionBall old_optimum_ball(const TrainedModel& old, const UpdateStats& stats) {
  if (stats.n_new == 0) throw Error("updated training set is empty");
  if (!(old.lambda > 0.0)) throw Error("lambda must be positive");
  if (stats.delta_s.size() != old.dim()) throw DimensionError("delta_s length differs from model dimension");

  const double n_new = static_cast<double>(stats.n_new);
  const double n_old = static_cast<double>(stats.n_old);
  const double changed = static_cast<double>(stats.n_added + stats.n_removed);
  const double net = static_cast<double>(stats.n_added) - static_cast<double>(stats.n_removed);
  const double inv_lambda = 1.0 / old.lambda;

  const double center_old = (n_old + n_new) / (2.0 * n_new);
  const double center_ds = inv_lambda * changed / (2.0 * n_new);
  const double radius_old = net / n_new;
  const double radius_ds = inv_lambda * changed / n_new;

  SolutionBall ball;
  ball.source = BallSource::OldOptimum;
  ball.center.resize(old.dim());
  double sq = 0.0;
  for (std::size_t j = 0; j < old.dim(); ++j) {
    ball.center[j] = center_old * old.beta[j] - center_ds * stats.delta_s[j];
    const double v = radius_old * old.beta[j] + radius_ds * stats.delta_s[j];
    sq += v * v;
  }
  ball.radius = 0.5 * std::sqrt(sq);
  return ball;
}

SolutionBall gradient_ball(std::span<const double> candidate, std::span<const double> gradient, double lambda) {
  if (!(lambda > 0.0)) throw Error("lambda must be positive");
  if (candidate.size() != gradient.size()) {
    throw DimensionError("candidate and gradient lengths differ");
  }
  const double half_inv_lambda = 0.5 / lambda;
  SolutionBall ball;
  ball.source = BallSource::GradientIterate;
  ball.center.resize(candidate.size());
  for (std::size_t j = 0; j < candidate.size(); ++j) {
    ball.center[j] = candidate[j] - half_inv_lambda * gradient[j];
  }
  ball.radius = half_inv_lambda * norm(gradient);
  return ball;
}

namespace {

BoundMethod method_of(const SolutionBall& ball) {
  return ball.source == BallSource::OldOptimum ? BoundMethod::OldOptimumBall : BoundMethod::GradientBall;
}

ScoreBounds from_center(double projected, double eta_norm, const SolutionBall& ball) {
  const double half = eta_norm * ball.radius;
  return {projected - half, projected + half, eta_norm, method_of(ball)};
}

}  // namespace

ScoreBounds score_bounds(const SolutionBall& ball, std::span<const double> eta) {
  if (eta.size() != ball.dim()) {
    throw DimensionError("eta has length " + std::to_string(eta.size()) + ", ball dimension is " +
                         std::to_string(ball.dim()));
  }
  return from_center(dot(eta, ball.center), norm(eta), ball);
}

ScoreBounds score_bounds(const SolutionBall& ball, SparseRow x, double scale) {
  return from_center(scale * dot(x, ball.center), std::abs(scale) * norm(x), ball);
}

std::vector<CoefficientInterval> coefficient_bounds(const SolutionBall& ball) {
  std::vector<CoefficientInterval> out(ball.dim());
  for (std::size_t j = 0; j < ball.dim(); ++j) {
    out[j] = {ball.center[j], ball.radius};
  }
  return out;
}

double norm_change_bound(const TrainedModel& old, std::span<const CoefficientInterval> coef, double q) {
  if (!(q > 0.0)) throw Error("norm order q must be positive");
  if (coef.size() != old.dim()) throw DimensionError("coefficient bounds length differs from model dimension");
  const bool max_norm = std::isinf(q);
  double acc = 0.0;
  for (std::size_t j = 0; j < coef.size(); ++j) {
    const double reach = std::max(old.beta[j] - coef[j].lower(), coef[j].upper() - old.beta[j]);
    acc = max_norm ? std::max(acc, reach) : acc + std::pow(reach, q);
  }
  return max_norm ? acc : std::pow(acc, 1.0 / q);
}

ScoreBounds naive_score_bounds(std::span<const CoefficientInterval> coef, std::span<const double> eta) {
  if (coef.size() != eta.size()) throw DimensionError("eta length differs from number of coefficients");
  ScoreBounds out;
  out.method = BoundMethod::NaiveBox;
  out.eta_norm = norm(eta);
  for (std::size_t j = 0; j < eta.size(); ++j) {
    if (eta[j] < 0.0) {
      out.lower += eta[j] * coef[j].upper();
      out.upper += eta[j] * coef[j].lower();
    } else if (eta[j] > 0.0) {
      out.lower += eta[j] * coef[j].lower();
      out.upper += eta[j] * coef[j].upper();
    }
  }
  return out;
}

LabelDecision decide(const ScoreBounds& bounds) {
  Label label = Label::Unknown;
  if (bounds.lower > 0.0) {
    label = Label::Plus;
  } else if (bounds.upper < 0.0) {
    label = Label::Minus;
  }
  return {label, bounds};
}

LabelDecision classify_with_bounds(const SolutionBall& ball, SparseRow x) { return decide(score_bounds(ball, x)); }

}  // namespace delta_scope
