#include "delta_scope/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "delta_scope/error.hpp"

namespace delta_scope {

void SparseDataset::push_back(SparseRow x, int y) {
  if (y != 1 && y != -1) {
    throw Error("label must be -1 or +1, got " + std::to_string(y));
  }
  if (!is_canonical(x)) {
    throw Error("row indices must be strictly increasing");
  }
  if (extent(x) > dim_) {
    throw DimensionError("row index " + std::to_string(x.back().index) +
                         " out of range for dimension " + std::to_string(dim_));
  }
  entries_.insert(entries_.end(), x.begin(), x.end());
  offsets_.push_back(entries_.size());
  labels_.push_back(y);
}

Instance SparseDataset::instance(std::size_t i) const {
  const auto r = row(i);
  return {SparseVector(r.begin(), r.end()), labels_[i]};
}

DatasetView::DatasetView(const SparseDataset& ds, std::vector<std::size_t> excluded)
    : ds_(&ds), excluded_(std::move(excluded)) {
  std::sort(excluded_.begin(), excluded_.end());
  if (std::adjacent_find(excluded_.begin(), excluded_.end()) != excluded_.end()) {
    throw Error("excluded row indices must be unique");
  }
  if (!excluded_.empty() && excluded_.back() >= ds.size()) {
    throw Error("excluded row index " + std::to_string(excluded_.back()) +
                " out of range for " + std::to_string(ds.size()) + " rows");
  }
}

void UpdatePlan::validate(const SparseDataset& base) const {
  std::vector<std::size_t> sorted = removed;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw Error("removal indices must be unique");
  }
  if (!sorted.empty() && sorted.back() >= base.size()) {
    throw Error("removal index " + std::to_string(sorted.back()) + " out of range for " +
                std::to_string(base.size()) + " rows");
  }
  for (const auto& inst : added) {
    if (extent(inst.x) > base.dim()) {
      throw DimensionError("added instance has feature index " +
                           std::to_string(inst.x.back().index) + " beyond dimension " +
                           std::to_string(base.dim()));
    }
  }
}

SparseDataset apply_update(const SparseDataset& base, const UpdatePlan& plan) {
  plan.validate(base);
  std::vector<bool> drop(base.size(), false);
  for (auto i : plan.removed) {
    drop[i] = true;
  }
  SparseDataset out(base.dim());
  for (std::size_t i = 0; i < base.size(); ++i) {
    if (!drop[i]) {
      out.push_back(base.row(i), base.label(i));
    }
  }
  for (const auto& inst : plan.added) {
    out.push_back(inst);
  }
  return out;
}

std::vector<Instance> removed_instances(const SparseDataset& base, const UpdatePlan& plan) {
  plan.validate(base);
  std::vector<Instance> out;
  out.reserve(plan.removed.size());
  for (auto i : plan.removed) {
    out.push_back(base.instance(i));
  }
  return out;
}

SparseDataset make_synthetic(std::uint64_t seed, std::size_t n, std::size_t d, double separation) {
  if (n < 2 || d < 1) {
    throw Error("make_synthetic requires n >= 2 and d >= 1");
  }
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(0.5);
  std::normal_distribution<double> noise(0.0, 1.0);
  const double shift = 0.5 * separation / std::sqrt(static_cast<double>(d));

  SparseDataset ds(d);
  SparseVector row(d);
  for (std::size_t i = 0; i < n; ++i) {
    int y = coin(rng) ? 1 : -1;
    if (i == 0) y = 1;
    if (i == 1) y = -1;
    for (std::size_t j = 0; j < d; ++j) {
      row[j] = {static_cast<std::uint32_t>(j), y * shift + noise(rng)};
    }
    ds.push_back(row, y);
  }
  return ds;
}

UpdatePlan make_random_update(std::uint64_t seed, const SparseDataset& base, std::size_t n_removed,
                              const SparseDataset& pool, std::size_t n_added) {
  if (n_removed > base.size() || n_added > pool.size()) {
    throw Error("update larger than the available rows");
  }
  if (n_added > 0 && pool.dim() > base.dim()) {
    throw DimensionError("pool dimension exceeds base dimension");
  }
  std::mt19937_64 rng(seed);
  auto sample = [&rng](std::size_t population, std::size_t k) {
    std::vector<std::size_t> idx(population);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    // partial Fisher-Yates
    for (std::size_t t = 0; t < k; ++t) {
      std::uniform_int_distribution<std::size_t> pick(t, population - 1);
      std::swap(idx[t], idx[pick(rng)]);
    }
    idx.resize(k);
    return idx;
  };
  UpdatePlan plan;
  plan.removed = sample(base.size(), n_removed);
  for (auto i : sample(pool.size(), n_added)) {
    plan.added.push_back(pool.instance(i));
  }
  return plan;
}

SparseDataset with_bias(const SparseDataset& ds) {
  SparseDataset out(ds.dim() + 1);
  SparseVector row;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto r = ds.row(i);
    row.assign(r.begin(), r.end());
    row.push_back({static_cast<std::uint32_t>(ds.dim()), 1.0});
    out.push_back(row, ds.label(i));
  }
  return out;
}

}  // namespace delta_scope
