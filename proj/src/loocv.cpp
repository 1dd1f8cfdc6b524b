#include "delta_scope/loocv.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <numeric>
#include <random>
#include <string>
#include <thread>

namespace delta_scope {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

std::string_view to_string(LoocvMode mode) {
  switch (mode) {
    case LoocvMode::Exact:
      return "exact";
    case LoocvMode::Op1:
      return "op1";
    case LoocvMode::Op2:
      return "op2";
  }
  return "unknown";
}

LoocvMode parse_loocv_mode(std::string_view name) {
  if (name == "exact") return LoocvMode::Exact;
  if (name == "op1") return LoocvMode::Op1;
  if (name == "op2") return LoocvMode::Op2;
  throw Error("unknown LOOCV mode '" + std::string(name) + "' (expected exact, op1 or op2)");
}

std::string_view to_string(FoldDecision decision) {
  switch (decision) {
    case FoldDecision::CorrectByBound:
      return "correct_by_bound";
    case FoldDecision::WrongByBound:
      return "wrong_by_bound";
    case FoldDecision::ResolvedBySolve:
      return "resolved_by_solve";
    case FoldDecision::ResolvedByEarlyStop:
      return "resolved_by_early_stop";
    case FoldDecision::Skipped:
      return "skipped";
  }
  return "unknown";
}

ScoreBounds loocv_fold_bounds(const TrainedModel& full, std::size_t h, const SparseDataset& ds) {
  const std::size_t n = full.n_train;
  if (n < 2) throw Error("leave-one-out needs at least two training instances");
  if (h >= ds.size()) throw Error("fold index " + std::to_string(h) + " out of range");
  if (ds.dim() != full.dim()) throw DimensionError("dataset and model dimensions differ");

  const SparseRow x = ds.row(h);
  const int y = ds.label(h);
  const double inv_lambda = 1.0 / full.lambda;
  const double margin = y * dot(x, full.beta);
  // gradient of the left-out loss is c * x
  const double c = dloss_dscore(full.kind, y, dot(x, full.beta));
  const double x_sq = squared_norm(x);
  const double nd = static_cast<double>(n);

  const double center = (2.0 * nd - 1.0) / (2.0 * nd - 2.0) * margin +
                        inv_lambda / (2.0 * nd - 2.0) * (y * c * x_sq);

  // ||beta + c x / lambda|| expanded so each fold costs O(nnz(x)); falls back
  // to the dense sum when the expansion cancels.
  const double beta_sq = dot(full.beta, full.beta);
  const double cx = inv_lambda * c;
  double shift_sq = beta_sq + 2.0 * cx * dot(x, full.beta) + cx * cx * x_sq;
  if (shift_sq < 1e-6 * (beta_sq + cx * cx * x_sq)) {
    DenseVector v = full.beta;
    axpy(cx, x, v);
    shift_sq = dot(v, v);
  }
  const double radius = 0.5 * std::sqrt(std::max(0.0, shift_sq)) / (nd - 1.0);
  const double x_norm = std::sqrt(x_sq);
  return {center - x_norm * radius, center + x_norm * radius, x_norm, BoundMethod::OldOptimumBall};
}

LoocvResult run_loocv(const SparseDataset& ds, double lambda, LossKind kind, const LoocvOptions& options) {
  const auto full = train(ds, lambda, kind, options.full_solver);
  auto result = run_loocv(full.model, ds, options);
  result.full_solver_iterations = full.report.iterations;
  result.wall_time += full.report.wall_time;
  return result;
}

LoocvResult run_loocv(const TrainedModel& full, const SparseDataset& ds, const LoocvOptions& options,
                      double prune_above) {
  const auto start = Clock::now();
  const std::size_t n = ds.size();
  if (n < 2) throw Error("leave-one-out needs at least two instances");
  if (full.n_train != n) {
    throw Error("full model was trained on " + std::to_string(full.n_train) + " instances, dataset has " +
                std::to_string(n));
  }

  LoocvResult result;
  result.n = n;
  result.folds.resize(n);

  std::size_t known_wrong = 0;
  std::size_t known_correct = 0;
  std::vector<std::size_t> pending;
  for (std::size_t h = 0; h < n; ++h) {
    auto& fold = result.folds[h];
    fold.index = h;
    fold.bounds = loocv_fold_bounds(full, h, ds);
    if (options.mode != LoocvMode::Exact && fold.bounds.lower > 0.0) {
      fold.decision = FoldDecision::CorrectByBound;
      fold.correct = true;
      ++known_correct;
    } else if (options.mode != LoocvMode::Exact && fold.bounds.upper < 0.0) {
      fold.decision = FoldDecision::WrongByBound;
      ++known_wrong;
    } else {
      pending.push_back(h);
    }
  }
  result.bound_time = seconds_since(start);
  const double nd = static_cast<double>(n);
  result.screen_lower = static_cast<double>(known_wrong) / nd;
  result.screen_upper = static_cast<double>(n - known_correct) / nd;

  if (options.order_trick) {
    std::vector<double> margin(n);
    for (auto h : pending) margin[h] = ds.label(h) * dot(ds.row(h), full.beta);
    std::stable_sort(pending.begin(), pending.end(),
                     [&margin](std::size_t a, std::size_t b) { return margin[a] < margin[b]; });
  }

  const auto solve_start = Clock::now();
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> wrong{known_wrong};
  std::atomic<bool> pruned{false};
  std::mutex error_mutex;
  std::exception_ptr first_error;

  auto worker = [&] {
    while (true) {
      const std::size_t slot = next.fetch_add(1);
      if (slot >= pending.size()) return;
      if (static_cast<double>(wrong.load()) / nd > prune_above) {
        pruned = true;
        next = pending.size();
        return;
      }
      const std::size_t h = pending[slot];
      auto& fold = result.folds[h];
      const SparseRow x = ds.row(h);
      const int y = ds.label(h);
      std::optional<bool> early;
      StopHook hook;
      if (options.mode == LoocvMode::Op2) {
        hook = [&](std::span<const double> beta, std::span<const double> grad) {
          const auto b = score_bounds(gradient_ball(beta, grad, full.lambda), x, static_cast<double>(y));
          if (b.lower > 0.0) early = true;
          if (b.upper < 0.0) early = false;
          return early.has_value();
        };
      }
      try {
        const auto solved = incremental_train(full, DatasetView(ds, {h}), options.fold_solver, hook);
        fold.solver_iterations = solved.report.iterations;
        if (solved.report.stopped_early) {
          fold.decision = FoldDecision::ResolvedByEarlyStop;
          fold.correct = *early;
        } else {
          fold.decision = FoldDecision::ResolvedBySolve;
          fold.solved_margin = y * dot(x, solved.model.beta);
          fold.correct = fold.solved_margin > 0.0;
        }
        if (!fold.correct) wrong.fetch_add(1);
      } catch (const std::exception& e) {
        std::lock_guard lock(error_mutex);
        if (!first_error) first_error = std::make_exception_ptr(FoldError(h, e.what()));
        next = pending.size();
        return;
      }
    }
  };

  const unsigned threads = std::max(1u, std::min<unsigned>(options.threads, static_cast<unsigned>(pending.size())));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (first_error) std::rethrow_exception(first_error);
  result.solve_time = seconds_since(solve_start);

  known_wrong = 0;
  known_correct = 0;
  for (const auto& fold : result.folds) {
    if (fold.decision == FoldDecision::Skipped) continue;
    if (fold.decision == FoldDecision::ResolvedBySolve || fold.decision == FoldDecision::ResolvedByEarlyStop) {
      ++result.solves_performed;
      result.solver_iterations += fold.solver_iterations;
    }
    fold.correct ? ++known_correct : ++known_wrong;
  }
  result.pruned = pruned.load();
  result.error_lower = static_cast<double>(known_wrong) / nd;
  result.error_upper = static_cast<double>(n - known_correct) / nd;
  result.error_rate = result.error_lower;
  result.wall_time = seconds_since(start);
  return result;
}

RbfFeatureMap RbfFeatureMap::sample(const SparseDataset& ds, std::size_t k, double gamma, std::uint64_t seed) {
  if (ds.empty()) throw Error("cannot sample RBF centers from an empty dataset");
  if (!(gamma > 0.0)) throw Error("RBF gamma must be positive");
  k = std::min(k, ds.size());
  std::vector<std::size_t> idx(ds.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  for (std::size_t t = 0; t < k; ++t) {
    std::uniform_int_distribution<std::size_t> pick(t, idx.size() - 1);
    std::swap(idx[t], idx[pick(rng)]);
  }
  RbfFeatureMap map;
  map.gamma = gamma;
  for (std::size_t t = 0; t < k; ++t) map.centers.push_back(to_dense(ds.row(idx[t]), ds.dim()));
  return map;
}

SparseDataset RbfFeatureMap::apply(const SparseDataset& ds) const {
  std::vector<double> center_sq;
  for (const auto& c : centers) {
    if (c.size() != ds.dim()) throw DimensionError("RBF center dimension differs from dataset");
    center_sq.push_back(dot(c, c));
  }
  SparseDataset out(centers.size());
  SparseVector row;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    row.clear();
    const auto x = ds.row(i);
    const double x_sq = squared_norm(x);
    for (std::size_t k = 0; k < centers.size(); ++k) {
      const double dist_sq = std::max(0.0, x_sq - 2.0 * dot(x, centers[k]) + center_sq[k]);
      const double v = std::exp(-gamma * dist_sq);
      if (v != 0.0) row.push_back({static_cast<std::uint32_t>(k), v});
    }
    out.push_back(row, ds.label(i));
  }
  return out;
}

std::vector<GridCell> log2_lambda_grid(int lo, int hi) {
  if (lo > hi) throw Error("empty lambda grid");
  std::vector<GridCell> grid;
  for (int e = lo; e <= hi; ++e) grid.push_back({std::ldexp(1.0, e), std::nullopt});
  return grid;
}

ModelSelection model_select(const SparseDataset& ds, std::span<const GridCell> grid, LossKind kind,
                            const ModelSelectOptions& options) {
  if (grid.empty()) throw Error("model selection over an empty grid");
  std::optional<RbfFeatureMap> base_map;
  std::map<double, SparseDataset> mapped;

  ModelSelection selection;
  double incumbent = std::numeric_limits<double>::infinity();
  std::optional<std::size_t> best;
  for (std::size_t c = 0; c < grid.size(); ++c) {
    const auto& cell = grid[c];
    const SparseDataset* data = &ds;
    if (cell.rbf_gamma) {
      if (!base_map) base_map = RbfFeatureMap::sample(ds, options.rbf_centers, *cell.rbf_gamma, options.seed);
      auto it = mapped.find(*cell.rbf_gamma);
      if (it == mapped.end()) {
        RbfFeatureMap map = *base_map;
        map.gamma = *cell.rbf_gamma;
        it = mapped.emplace(*cell.rbf_gamma, map.apply(ds)).first;
      }
      data = &it->second;
    }
    try {
      const auto full = train(*data, cell.lambda, kind, options.loocv.full_solver);
      auto result = run_loocv(full.model, *data, options.loocv,
                              options.prune_trick ? incumbent : std::numeric_limits<double>::infinity());
      result.full_solver_iterations = full.report.iterations;
      result.wall_time += full.report.wall_time;
      if (!result.pruned && (!best || result.error_rate < incumbent)) {
        incumbent = result.error_rate;
        best = c;
      }
      selection.cells.push_back({cell, std::move(result)});
    } catch (const std::exception& e) {
      throw Error("grid cell " + std::to_string(c) + " (lambda=" + std::to_string(cell.lambda) + "): " + e.what());
    }
  }
  selection.best_index = *best;
  return selection;
}

}  // namespace delta_scope
