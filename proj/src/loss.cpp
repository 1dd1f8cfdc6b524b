#include "delta_scope/loss.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "delta_scope/error.hpp"

namespace delta_scope {

namespace {

// 1 / (1 + exp(-t)) without overflow
double sigmoid(double t) {
  if (t >= 0.0) {
    return 1.0 / (1.0 + std::exp(-t));
  }
  const double e = std::exp(t);
  return e / (1.0 + e);
}

void check_problem(const DatasetView& data, std::span<const double> beta, double lambda) {
  if (data.size() == 0) {
    throw Error("objective over an empty dataset");
  }
  if (!(lambda > 0.0)) {
    throw Error("lambda must be positive");
  }
  if (beta.size() != data.dim()) {
    throw DimensionError("beta has length " + std::to_string(beta.size()) + ", data dimension is " +
                         std::to_string(data.dim()));
  }
}

}  // namespace

std::string_view to_string(LossKind kind) {
  switch (kind) {
    case LossKind::Logistic:
      return "logistic";
    case LossKind::L2Hinge:
      return "l2hinge";
  }
  return "unknown";
}

LossKind parse_loss_kind(std::string_view name) {
  if (name == "logistic") return LossKind::Logistic;
  if (name == "l2hinge") return LossKind::L2Hinge;
  throw Error("unknown loss '" + std::string(name) + "' (expected logistic or l2hinge)");
}

double loss_value(LossKind kind, int y, double score) {
  const double z = y * score;
  switch (kind) {
    case LossKind::Logistic:
      return std::log1p(std::exp(-std::abs(z))) + std::max(0.0, -z);
    case LossKind::L2Hinge: {
      const double slack = std::max(0.0, 1.0 - z);
      return slack * slack;
    }
  }
  return 0.0;
}

double dloss_dscore(LossKind kind, int y, double score) {
  const double z = y * score;
  switch (kind) {
    case LossKind::Logistic:
      return -y * sigmoid(-z);
    case LossKind::L2Hinge:
      return -2.0 * y * std::max(0.0, 1.0 - z);
  }
  return 0.0;
}

DenseVector grad_instance(LossKind kind, SparseRow x, int y, std::span<const double> beta) {
  const double c = dloss_dscore(kind, y, dot(x, beta));
  DenseVector g(beta.size(), 0.0);
  axpy(c, x, g);
  return g;
}

double objective(const DatasetView& data, std::span<const double> beta, double lambda, LossKind kind) {
  check_problem(data, beta, lambda);
  double total = 0.0;
  data.for_each([&](std::size_t, SparseRow x, int y) { total += loss_value(kind, y, dot(x, beta)); });
  return total / static_cast<double>(data.size()) + 0.5 * lambda * dot(beta, beta);
}

DenseVector objective_gradient(const DatasetView& data, std::span<const double> beta, double lambda,
                               LossKind kind) {
  DenseVector g(beta.size());
  objective_and_gradient(data, beta, lambda, kind, g);
  return g;
}

double objective_and_gradient(const DatasetView& data, std::span<const double> beta, double lambda,
                              LossKind kind, std::span<double> gradient) {
  check_problem(data, beta, lambda);
  if (gradient.size() != beta.size()) {
    throw DimensionError("gradient buffer length mismatch");
  }
  std::fill(gradient.begin(), gradient.end(), 0.0);
  double total = 0.0;
  data.for_each([&](std::size_t, SparseRow x, int y) {
    const double s = dot(x, beta);
    total += loss_value(kind, y, s);
    const double c = dloss_dscore(kind, y, s);
    if (c != 0.0) {
      axpy(c, x, gradient);
    }
  });
  const double inv_n = 1.0 / static_cast<double>(data.size());
  for (std::size_t j = 0; j < gradient.size(); ++j) {
    gradient[j] = gradient[j] * inv_n + lambda * beta[j];
  }
  return total * inv_n + 0.5 * lambda * dot(beta, beta);
}

}  // namespace delta_scope
