#pragma once

// Test-only reference computations. Nothing here calls the library's loss,
// solver or bounds code, so the checks built on it stay independent.

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "delta_scope/dataset.hpp"
#include "delta_scope/loss.hpp"

namespace oracle {

using delta_scope::LossKind;
using delta_scope::SparseDataset;

struct DenseProblem {
  Eigen::MatrixXd x;  // n x d
  Eigen::VectorXd y;
};

inline DenseProblem densify(const SparseDataset& ds, const std::vector<std::size_t>& skip = {}) {
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    bool drop = false;
    for (auto s : skip) drop = drop || s == i;
    if (!drop) keep.push_back(i);
  }
  DenseProblem p{Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(keep.size()), static_cast<Eigen::Index>(ds.dim())),
                 Eigen::VectorXd(static_cast<Eigen::Index>(keep.size()))};
  for (std::size_t r = 0; r < keep.size(); ++r) {
    for (const auto& e : ds.row(keep[r])) p.x(static_cast<Eigen::Index>(r), e.index) = e.value;
    p.y(static_cast<Eigen::Index>(r)) = ds.label(keep[r]);
  }
  return p;
}

// Per-instance first and second derivatives with respect to the score.
inline void derivs(LossKind kind, double y, double s, double& loss, double& d1, double& d2) {
  const double z = y * s;
  if (kind == LossKind::Logistic) {
    // p = 1 / (1 + e^z)
    const double p = z > 0 ? std::exp(-z) / (1.0 + std::exp(-z)) : 1.0 / (1.0 + std::exp(z));
    loss = z > 0 ? std::log1p(std::exp(-z)) : -z + std::log1p(std::exp(z));
    d1 = -y * p;
    d2 = p * (1.0 - p);
  } else {
    const double slack = 1.0 - z;
    loss = slack > 0 ? slack * slack : 0.0;
    d1 = slack > 0 ? -2.0 * y * slack : 0.0;
    d2 = slack > 0 ? 2.0 : 0.0;
  }
}

struct Evaluation {
  double value;
  Eigen::VectorXd grad;
  Eigen::MatrixXd hess;
};

inline Evaluation evaluate(const DenseProblem& p, const Eigen::VectorXd& beta, double lambda, LossKind kind) {
  const auto n = p.x.rows();
  const Eigen::VectorXd s = p.x * beta;
  Eigen::VectorXd c1(n), c2(n);
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    double l, a, b;
    derivs(kind, p.y(i), s(i), l, a, b);
    total += l;
    c1(i) = a;
    c2(i) = b;
  }
  Evaluation ev;
  ev.value = total / n + 0.5 * lambda * beta.squaredNorm();
  ev.grad = p.x.transpose() * c1 / static_cast<double>(n) + lambda * beta;
  ev.hess = p.x.transpose() * c2.asDiagonal() * p.x / static_cast<double>(n);
  ev.hess.diagonal().array() += lambda;
  return ev;
}

struct Solution {
  Eigen::VectorXd beta;
  double grad_norm;
};

/// Damped (semismooth for L2-hinge) Newton to gradient norm <= tol.
inline Solution newton_solve(const DenseProblem& p, double lambda, LossKind kind, double tol = 1e-12) {
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p.x.cols());
  Solution best{beta, INFINITY};
  for (int it = 0; it < 200; ++it) {
    auto ev = evaluate(p, beta, lambda, kind);
    const double gn = ev.grad.norm();
    if (gn < best.grad_norm) best = {beta, gn};
    if (gn <= tol) break;
    const Eigen::VectorXd step = ev.hess.ldlt().solve(-ev.grad);
    double t = 1.0;
    bool moved = false;
    for (int k = 0; k < 60; ++k, t *= 0.5) {
      const Eigen::VectorXd cand = beta + t * step;
      const auto ce = evaluate(p, cand, lambda, kind);
      if (ce.value <= ev.value + 1e-4 * t * ev.grad.dot(step) || ce.grad.norm() < gn) {
        beta = cand;
        moved = true;
        break;
      }
    }
    if (!moved) break;
  }
  const double gn = evaluate(p, beta, lambda, kind).grad.norm();
  if (gn < best.grad_norm) best = {beta, gn};
  return best;
}

inline Solution newton_solve(const SparseDataset& ds, double lambda, LossKind kind,
                             const std::vector<std::size_t>& skip = {}, double tol = 1e-12) {
  return newton_solve(densify(ds, skip), lambda, kind, tol);
}

inline std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

/// Random sparse-ish labeled data: rows drawn around +-mu with a random
/// fraction of coordinates zeroed.
inline SparseDataset random_dataset(std::mt19937_64& rng, std::size_t n, std::size_t d) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double density = 0.4 + 0.6 * u(rng);
  const double sep = 2.0 * u(rng);
  std::vector<double> mu(d);
  for (auto& m : mu) m = g(rng);
  SparseDataset ds(d);
  for (std::size_t i = 0; i < n; ++i) {
    const int y = (i % 2 == 0) ? 1 : -1;
    delta_scope::SparseVector row;
    for (std::size_t j = 0; j < d; ++j) {
      if (u(rng) > density) continue;
      row.push_back({static_cast<std::uint32_t>(j), y * sep * mu[j] / std::sqrt(double(d)) + g(rng)});
    }
    ds.push_back(row, u(rng) < 0.9 ? y : -y);
  }
  return ds;
}

}  // namespace oracle
