#include "bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>

#include "delta_scope/bounds.hpp"
#include "report.hpp"

namespace delta_scope::cli {

namespace {

using Clock = std::chrono::steady_clock;

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::size_t a, std::size_t b, std::size_t c) {
  return splitmix(splitmix(splitmix(seed ^ a) ^ b) ^ c);
}

SparseDataset subset(const SparseDataset& ds, std::span<const std::size_t> rows) {
  SparseDataset out(ds.dim());
  for (auto i : rows) out.push_back(ds.row(i), ds.label(i));
  return out;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

struct Split {
  SparseDataset base;
  SparseDataset pool;
};

Split split(const SparseDataset& train, const std::vector<std::size_t>& perm, std::size_t n_old) {
  const std::span<const std::size_t> all(perm);
  return {subset(train, all.first(n_old)), subset(train, all.subspan(n_old))};
}

}  // namespace

const char* to_string(Sweep sweep) { return sweep == Sweep::UpdateFraction ? "update-fraction" : "n-old"; }

std::vector<BenchRow> run_bench(const SparseDataset& train, const SparseDataset& test, const BenchConfig& config) {
  const std::size_t n_train = train.size();
  if (n_train < 2) throw Error("bench needs at least two training instances");
  if (test.empty()) throw Error("bench needs a nonempty test set");
  if (test.dim() != train.dim()) throw DimensionError("test and training dimensions differ");
  if (config.repeats == 0 || config.timing_repetitions == 0) throw Error("repeat counts must be positive");

  std::vector<std::size_t> perm(n_train);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::mt19937_64 rng(config.seed);
  std::shuffle(perm.begin(), perm.end(), rng);

  std::vector<BenchRow> rows;
  for (std::size_t li = 0; li < config.lambdas.size(); ++li) {
    const double lambda = config.lambdas[li];
    std::optional<Split> fixed;
    std::optional<TrainedModel> fixed_model;
    if (config.sweep == Sweep::UpdateFraction) {
      const auto n_old = static_cast<std::size_t>(std::llround(0.99 * static_cast<double>(n_train)));
      fixed = split(train, perm, std::clamp<std::size_t>(n_old, 1, n_train - 1));
      fixed_model = train_model(fixed->base, lambda, config);
    }

    for (std::size_t pi = 0; pi < config.points.size(); ++pi) {
      const double point = config.points[pi];
      std::optional<Split> local;
      std::optional<TrainedModel> local_model;
      std::size_t k = 0;
      if (config.sweep == Sweep::UpdateFraction) {
        k = static_cast<std::size_t>(std::llround(point * static_cast<double>(fixed->base.size())));
      } else {
        const auto n_old = static_cast<std::size_t>(std::llround(point * static_cast<double>(n_train)));
        local = split(train, perm, std::clamp<std::size_t>(n_old, 1, n_train - 1));
        local_model = train_model(local->base, lambda, config);
        k = static_cast<std::size_t>(std::llround(config.fixed_update_fraction * static_cast<double>(n_train)));
      }
      const Split& data = local ? *local : *fixed;
      const TrainedModel& old = local_model ? *local_model : *fixed_model;
      k = std::max<std::size_t>(k, 1);
      const std::size_t n_added = (k + 1) / 2;
      const std::size_t n_removed = k / 2;
      if (n_added > data.pool.size()) {
        throw Error("update of " + std::to_string(k) + " instances needs " + std::to_string(n_added) +
                    " held-out rows but only " + std::to_string(data.pool.size()) + " are available");
      }
      if (n_removed >= data.base.size()) throw Error("update would remove the whole training set");

      for (std::size_t r = 0; r < config.repeats; ++r) {
        const auto plan =
            make_random_update(derive_seed(config.seed, li, pi, r), data.base, n_removed, data.pool, n_added);

        BenchRow row;
        row.dataset = config.dataset_name;
        row.lambda = lambda;
        row.sweep = config.sweep;
        row.n_old = data.base.size();
        row.n_added = n_added;
        row.n_removed = n_removed;
        row.update_fraction = static_cast<double>(k) / static_cast<double>(row.n_old);
        row.old_fraction = static_cast<double>(row.n_old) / static_cast<double>(n_train);
        row.repeat = r;

        std::vector<double> times;
        std::size_t decided = 0;
        for (std::size_t t = 0; t < config.timing_repetitions; ++t) {
          const auto start = Clock::now();
          const auto ball = old_optimum_ball(old, compute_delta_s(old, data.base, plan));
          const auto coef = coefficient_bounds(ball);
          decided = 0;
          for (std::size_t i = 0; i < test.size(); ++i) {
            decided += classify_with_bounds(ball, test.row(i)).label != Label::Unknown;
          }
          times.push_back(std::chrono::duration<double>(Clock::now() - start).count());
          row.tightness = coef.empty() ? 0.0 : coef.front().width();
        }
        row.bound_time = median(std::move(times));
        row.fraction_determined = static_cast<double>(decided) / static_cast<double>(test.size());

        if (config.retrain) {
          const auto updated = apply_update(data.base, plan);
          const auto start = Clock::now();
          const auto res = incremental_train(old, updated, config.solver);
          row.retrain_time = std::chrono::duration<double>(Clock::now() - start).count();
          row.retrain_iterations = res.report.iterations;
        }
        rows.push_back(std::move(row));
      }
    }
  }
  return rows;
}

TrainedModel train_model(const SparseDataset& ds, double lambda, const BenchConfig& config) {
  return train(ds, lambda, config.kind, config.solver).model;
}

std::string bench_csv_header() {
  return csv_row({"dataset", "lambda", "sweep", "update_fraction", "old_fraction", "n_old", "n_added", "n_removed",
                  "repeat", "tightness", "fraction_determined", "bound_time", "retrain_time", "retrain_iterations"});
}

std::string bench_csv_line(const BenchRow& row) {
  return csv_row({row.dataset, csv_number(row.lambda), to_string(row.sweep), csv_number(row.update_fraction),
                  csv_number(row.old_fraction), std::to_string(row.n_old), std::to_string(row.n_added),
                  std::to_string(row.n_removed), std::to_string(row.repeat), csv_number(row.tightness),
                  csv_number(row.fraction_determined), csv_number(row.bound_time),
                  row.retrain_time ? csv_number(*row.retrain_time) : std::string(),
                  row.retrain_time ? std::to_string(row.retrain_iterations) : std::string()});
}

}  // namespace delta_scope::cli
