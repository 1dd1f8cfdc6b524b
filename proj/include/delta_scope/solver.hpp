#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>

#include "delta_scope/dataset.hpp"
#include "delta_scope/error.hpp"
#include "delta_scope/loss.hpp"

namespace delta_scope {

/// Residual below which a model counts as an exact optimum for the
/// old-optimum ball.
inline constexpr double kExactResidualThreshold = 1e-6;

struct SolverOptions {
  /// Stop once ||gradient|| <= tol.
  double tol = 1e-8;
  std::size_t max_iterations = 10000;
  /// L-BFGS memory. 0 gives steepest descent with the same line search.
  std::size_t history = 10;
  double armijo_c = 1e-4;
  double shrink = 0.5;
};

/// A trained L2-regularized linear classifier f(x) = x^T beta.
struct TrainedModel {
  DenseVector beta;
  double lambda = 1.0;
  LossKind kind = LossKind::Logistic;
  /// ||gradient of the training objective|| at beta.
  double grad_residual = 0.0;
  std::size_t n_train = 0;
  /// The last coordinate of beta multiplies a constant-1 feature.
  bool has_bias = false;

  std::size_t dim() const noexcept { return beta.size(); }
};

struct SolveReport {
  std::size_t iterations = 0;
  double final_grad_norm = 0.0;
  bool stopped_early = false;
  double wall_time = 0.0;
};

struct TrainResult {
  TrainedModel model;
  SolveReport report;
};

/// Called once per outer iteration with the current iterate and its exact
/// objective gradient. Returning true ends the solve early.
using StopHook = std::function<bool(std::span<const double> beta, std::span<const double> gradient)>;

/// Thrown when the iteration cap is reached or the line search cannot make
/// progress; carries the iterate with the smallest gradient norm seen.
class SolverError : public Error {
 public:
  SolverError(const std::string& what, DenseVector best, double residual, std::size_t iterations)
      : Error(what), best_(std::move(best)), residual_(residual), iterations_(iterations) {}

  const DenseVector& best_iterate() const noexcept { return best_; }
  double residual() const noexcept { return residual_; }
  std::size_t iterations() const noexcept { return iterations_; }

 private:
  DenseVector best_;
  double residual_;
  std::size_t iterations_;
};

/// Minimizes the regularized empirical risk over `data` with limited-memory
/// BFGS and a backtracking line search. Starts from `init` when given,
/// otherwise from zero. Deterministic for identical inputs.
TrainResult train(const DatasetView& data, double lambda, LossKind kind, const SolverOptions& options = {},
                  std::optional<std::span<const double>> init = std::nullopt, const StopHook& hook = {});

/// Warm-started retraining on `new_data` reusing old.lambda and old.kind.
/// Equivalent to train(new_data, ..., init = old.beta, hook).
TrainResult incremental_train(const TrainedModel& old, const DatasetView& new_data,
                              const SolverOptions& options = {}, const StopHook& hook = {});

}  // namespace delta_scope
