#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "delta_scope/dataset.hpp"
#include "delta_scope/loss.hpp"
#include "delta_scope/solver.hpp"

namespace delta_scope::cli {

enum class Sweep { UpdateFraction, OldFraction };

struct BenchConfig {
  std::string dataset_name;
  std::vector<double> lambdas;
  LossKind kind = LossKind::Logistic;
  Sweep sweep = Sweep::UpdateFraction;
  // (n_A + n_R) / n_old for the update sweep, n_old / n_train for the other.
  std::vector<double> points;
  // Size of each update in the n_old sweep, as a fraction of n_train.
  double fixed_update_fraction = 0.001;
  std::size_t repeats = 30;
  std::size_t timing_repetitions = 5;
  bool retrain = true;
  std::uint64_t seed = 0;
  SolverOptions solver{};
};

struct BenchRow {
  std::string dataset;
  double lambda = 0.0;
  Sweep sweep = Sweep::UpdateFraction;
  double update_fraction = 0.0;
  double old_fraction = 0.0;
  std::size_t n_old = 0;
  std::size_t n_added = 0;
  std::size_t n_removed = 0;
  std::size_t repeat = 0;
  double tightness = 0.0;
  double fraction_determined = 0.0;
  double bound_time = 0.0;
  std::optional<double> retrain_time;
  std::size_t retrain_iterations = 0;
};

const char* to_string(Sweep sweep);

// Sensitivity benchmark: train an old model on a seeded subset of `train`,
// apply random updates drawn from the held-out rows, and record bound tightness,
// labels decided on `test`, and bound versus retrain time.
std::vector<BenchRow> run_bench(const SparseDataset& train, const SparseDataset& test, const BenchConfig& config);

TrainedModel train_model(const SparseDataset& ds, double lambda, const BenchConfig& config);

std::string bench_csv_header();
std::string bench_csv_line(const BenchRow& row);

}  // namespace delta_scope::cli
