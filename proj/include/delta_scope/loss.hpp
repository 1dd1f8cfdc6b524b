#pragma once

#include <span>
#include <string_view>

#include "delta_scope/dataset.hpp"
#include "delta_scope/sparse.hpp"

namespace delta_scope {

/// Convex, continuously differentiable margin losses.
enum class LossKind { Logistic, L2Hinge };

std::string_view to_string(LossKind kind);
/// Accepts "logistic" and "l2hinge"; throws Error otherwise.
LossKind parse_loss_kind(std::string_view name);

/// log(1 + exp(-y s)) or max(0, 1 - y s)^2.
double loss_value(LossKind kind, int y, double score);

/// Derivative of loss_value with respect to the score.
double dloss_dscore(LossKind kind, int y, double score);

/// Gradient of the per-instance loss with respect to beta, as a dense vector.
DenseVector grad_instance(LossKind kind, SparseRow x, int y, std::span<const double> beta);

/// (1/n) sum_i loss(y_i, x_i^T beta) + (lambda/2) ||beta||^2 over the rows of
/// `data`. Rows are accumulated in ascending index order.
double objective(const DatasetView& data, std::span<const double> beta, double lambda, LossKind kind);

/// Gradient of objective(); one pass over the data.
DenseVector objective_gradient(const DatasetView& data, std::span<const double> beta, double lambda,
                               LossKind kind);

/// Objective value and gradient from a single pass. `gradient` must have
/// length beta.size().
double objective_and_gradient(const DatasetView& data, std::span<const double> beta, double lambda,
                              LossKind kind, std::span<double> gradient);

}  // namespace delta_scope
