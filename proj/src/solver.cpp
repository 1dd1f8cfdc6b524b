#include "delta_scope/solver.hpp"

#include <chrono>
#include <cmath>
#include <deque>
#include <string>

#include "delta_scope/sparse.hpp"

namespace delta_scope {

namespace {

// Rounding slack for the approximate-Wolfe acceptance test used once the
// objective decrease falls below floating-point resolution.
constexpr double kObjectiveSlack = 1e-12;
constexpr int kMaxBacktracks = 80;

struct Correction {
  DenseVector s;
  DenseVector y;
  double rho;
};

// Two-loop recursion: returns -H g.
DenseVector lbfgs_direction(const std::deque<Correction>& memory, std::span<const double> g) {
  DenseVector q(g.begin(), g.end());
  std::vector<double> alpha(memory.size());
  for (std::size_t k = memory.size(); k-- > 0;) {
    const auto& c = memory[k];
    alpha[k] = c.rho * dot(c.s, q);
    for (std::size_t j = 0; j < q.size(); ++j) q[j] -= alpha[k] * c.y[j];
  }
  if (!memory.empty()) {
    const auto& last = memory.back();
    const double gamma = dot(last.s, last.y) / dot(last.y, last.y);
    for (auto& v : q) v *= gamma;
  }
  for (std::size_t k = 0; k < memory.size(); ++k) {
    const auto& c = memory[k];
    const double b = c.rho * dot(c.y, q);
    for (std::size_t j = 0; j < q.size(); ++j) q[j] += (alpha[k] - b) * c.s[j];
  }
  for (auto& v : q) v = -v;
  return q;
}

}  // namespace

TrainResult train(const DatasetView& data, double lambda, LossKind kind, const SolverOptions& options,
                  std::optional<std::span<const double>> init, const StopHook& hook) {
  if (!(lambda > 0.0)) throw Error("lambda must be positive");
  if (!(options.tol > 0.0)) throw Error("tolerance must be positive");
  if (data.size() == 0) throw Error("cannot train on an empty dataset");
  const std::size_t d = data.dim();
  if (init && init->size() != d) {
    throw DimensionError("initial point has length " + std::to_string(init->size()) +
                         ", data dimension is " + std::to_string(d));
  }

  const auto start = std::chrono::steady_clock::now();
  DenseVector x = init ? DenseVector(init->begin(), init->end()) : DenseVector(d, 0.0);
  DenseVector g(d);
  double f = objective_and_gradient(data, x, lambda, kind, g);

  DenseVector best = x;
  double best_norm = norm(g);
  std::deque<Correction> memory;
  DenseVector x_next(d);
  DenseVector g_next(d);

  auto finish = [&](std::size_t iterations, double gnorm, bool early) {
    TrainResult out;
    out.model = TrainedModel{x, lambda, kind, gnorm, data.size(), false};
    out.report.iterations = iterations;
    out.report.final_grad_norm = gnorm;
    out.report.stopped_early = early;
    out.report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
  };

  for (std::size_t iter = 0;; ++iter) {
    const double gnorm = norm(g);
    if (gnorm < best_norm) {
      best_norm = gnorm;
      best = x;
    }
    if (gnorm <= options.tol) return finish(iter, gnorm, false);
    if (hook && hook(x, g)) return finish(iter, gnorm, true);
    if (iter == options.max_iterations) {
      throw SolverError("iteration cap of " + std::to_string(options.max_iterations) +
                            " reached with gradient norm " + std::to_string(best_norm),
                        best, best_norm, iter);
    }

    bool accepted = false;
    while (!accepted) {
      DenseVector dir = options.history > 0 ? lbfgs_direction(memory, g) : DenseVector(d);
      double slope = dot(g, dir);
      if (options.history == 0 || !(slope < 0.0)) {
        for (std::size_t j = 0; j < d; ++j) dir[j] = -g[j];
        slope = -gnorm * gnorm;
        memory.clear();
      }
      double t = memory.empty() ? std::min(1.0, 1.0 / gnorm) : 1.0;
      for (int k = 0; k < kMaxBacktracks; ++k, t *= options.shrink) {
        for (std::size_t j = 0; j < d; ++j) x_next[j] = x[j] + t * dir[j];
        const double f_next = objective_and_gradient(data, x_next, lambda, kind, g_next);
        const bool armijo = f_next <= f + options.armijo_c * t * slope;
        const bool approx_wolfe =
            f_next <= f + kObjectiveSlack * std::abs(f) && std::abs(dot(g_next, dir)) <= 0.9 * std::abs(slope);
        if (armijo || approx_wolfe) {
          DenseVector s(d), y(d);
          for (std::size_t j = 0; j < d; ++j) {
            s[j] = x_next[j] - x[j];
            y[j] = g_next[j] - g[j];
          }
          const double sy = dot(s, y);
          if (options.history > 0 && sy > 1e-300) {
            memory.push_back({std::move(s), std::move(y), 1.0 / sy});
            if (memory.size() > options.history) memory.pop_front();
          }
          x.swap(x_next);
          g.swap(g_next);
          f = f_next;
          accepted = true;
          break;
        }
      }
      if (!accepted) {
        if (memory.empty()) {
          throw SolverError("line search failed with gradient norm " + std::to_string(gnorm), best,
                            best_norm, iter);
        }
        memory.clear();
      }
    }
  }
}

TrainResult incremental_train(const TrainedModel& old, const DatasetView& new_data, const SolverOptions& options,
                              const StopHook& hook) {
  auto result = train(new_data, old.lambda, old.kind, options, std::span<const double>(old.beta), hook);
  result.model.has_bias = old.has_bias;
  return result;
}

}  // namespace delta_scope
