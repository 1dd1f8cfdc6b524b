#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "delta_scope/bounds.hpp"
#include "delta_scope/dataset.hpp"
#include "delta_scope/error.hpp"
#include "delta_scope/loss.hpp"
#include "delta_scope/solver.hpp"

namespace delta_scope {

/// How folds that the old-optimum bounds cannot decide are handled.
enum class LoocvMode {
  /// Solve every fold (ground truth).
  Exact,
  /// Bound check first; warm-started full solve on undecided folds.
  Op1,
  /// As Op1, but each solve stops once the gradient-ball bounds on the
  /// left-out margin share a sign.
  Op2,
};

std::string_view to_string(LoocvMode mode);
LoocvMode parse_loocv_mode(std::string_view name);

enum class FoldDecision {
  CorrectByBound,
  WrongByBound,
  ResolvedBySolve,
  ResolvedByEarlyStop,
  /// Not evaluated because the model was pruned.
  Skipped,
};

std::string_view to_string(FoldDecision decision);

struct FoldOutcome {
  std::size_t index = 0;
  FoldDecision decision = FoldDecision::Skipped;
  bool correct = false;
  /// Old-optimum bounds on y_h x_h^T beta_(-h).
  ScoreBounds bounds;
  /// y_h x_h^T beta_(-h) from a completed solve; NaN otherwise.
  double solved_margin = std::numeric_limits<double>::quiet_NaN();
  std::size_t solver_iterations = 0;
};

struct LoocvOptions {
  LoocvMode mode = LoocvMode::Op1;
  /// Resolve undecided folds in increasing order of y_h x_h^T beta_full.
  bool order_trick = false;
  SolverOptions full_solver{};
  SolverOptions fold_solver{};
  /// Worker threads for fold solves; 1 runs inline.
  unsigned threads = 1;
};

struct LoocvResult {
  std::size_t n = 0;
  /// Misclassified fraction. For a pruned run this is error_lower.
  double error_rate = 0.0;
  /// Interval implied by everything known at the end of the run.
  double error_lower = 0.0;
  double error_upper = 1.0;
  /// Interval implied by the bound screen alone, before any solve.
  double screen_lower = 0.0;
  double screen_upper = 1.0;
  bool pruned = false;
  std::vector<FoldOutcome> folds;
  std::size_t solves_performed = 0;
  std::size_t solver_iterations = 0;
  std::size_t full_solver_iterations = 0;
  double bound_time = 0.0;
  double solve_time = 0.0;
  double wall_time = 0.0;
};

/// A solver failure inside a fold, tagged with the fold index.
class FoldError : public Error {
 public:
  FoldError(std::size_t fold, const std::string& what)
      : Error("fold " + std::to_string(fold) + ": " + what), fold_(fold) {}
  std::size_t fold() const noexcept { return fold_; }

 private:
  std::size_t fold_;
};

/// Bounds on y_h x_h^T beta_(-h) from the full-data optimum in O(nnz(x_h)).
/// Same values as the general add/remove route with R = {h}.
ScoreBounds loocv_fold_bounds(const TrainedModel& full, std::size_t h, const SparseDataset& ds);

/// Trains the full model, then runs leave-one-out.
LoocvResult run_loocv(const SparseDataset& ds, double lambda, LossKind kind, const LoocvOptions& options);

/// Leave-one-out from an already trained full model. Folds stop being solved
/// (result.pruned) once the known error fraction exceeds `prune_above`.
LoocvResult run_loocv(const TrainedModel& full, const SparseDataset& ds, const LoocvOptions& options,
                      double prune_above = std::numeric_limits<double>::infinity());

/// Gaussian RBF features phi_k(x) = exp(-gamma ||x - c_k||^2).
struct RbfFeatureMap {
  std::vector<DenseVector> centers;
  double gamma = 1.0;

  /// Picks min(k, n) distinct rows of `ds` as centers.
  static RbfFeatureMap sample(const SparseDataset& ds, std::size_t k, double gamma, std::uint64_t seed);
  SparseDataset apply(const SparseDataset& ds) const;
};

struct GridCell {
  double lambda = 1.0;
  std::optional<double> rbf_gamma;
};

/// Cells for lambda = 2^lo, ..., 2^hi.
std::vector<GridCell> log2_lambda_grid(int lo, int hi);

struct ModelSelectOptions {
  LoocvOptions loocv{};
  /// Abandon a cell once its error lower bound exceeds the best finished
  /// cell's error.
  bool prune_trick = false;
  std::size_t rbf_centers = 100;
  std::uint64_t seed = 0;
};

struct CellResult {
  GridCell cell;
  LoocvResult result;
};

struct ModelSelection {
  std::size_t best_index = 0;
  std::vector<CellResult> cells;

  const GridCell& best() const { return cells[best_index].cell; }
};

/// Lowest leave-one-out error over `grid`; ties go to the earliest cell.
ModelSelection model_select(const SparseDataset& ds, std::span<const GridCell> grid, LossKind kind,
                            const ModelSelectOptions& options);

}  // namespace delta_scope
