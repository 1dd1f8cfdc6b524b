#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "delta_scope/sparse.hpp"

namespace delta_scope {

/// A single labeled example; label is -1 or +1.
struct Instance {
  SparseVector x;
  int y = 1;

  friend bool operator==(const Instance&, const Instance&) = default;
};

/// Row-sparse labeled dataset stored in CSR layout.
///
/// Rows are appended through push_back, which validates them; after
/// construction the dataset is only read. Labels are always -1 or +1 and every
/// feature index lies in [0, dim()).
class SparseDataset {
 public:
  SparseDataset() = default;
  explicit SparseDataset(std::size_t dim) : dim_(dim) {}

  /// Appends a row. Throws DimensionError if an index is >= dim(), Error if
  /// indices are not strictly increasing or the label is not +-1.
  void push_back(SparseRow x, int y);
  void push_back(const Instance& inst) { push_back(inst.x, inst.y); }

  std::size_t size() const noexcept { return labels_.size(); }
  bool empty() const noexcept { return labels_.empty(); }
  std::size_t dim() const noexcept { return dim_; }
  std::size_t nnz() const noexcept { return entries_.size(); }

  SparseRow row(std::size_t i) const {
    return {entries_.data() + offsets_[i], entries_.data() + offsets_[i + 1]};
  }
  int label(std::size_t i) const { return labels_[i]; }
  std::span<const int> labels() const noexcept { return labels_; }

  Instance instance(std::size_t i) const;

  friend bool operator==(const SparseDataset&, const SparseDataset&) = default;

 private:
  std::size_t dim_ = 0;
  std::vector<SparseEntry> entries_;
  std::vector<std::size_t> offsets_{0};
  std::vector<int> labels_;
};

/// Logical subset of a dataset: every row except a sorted set of excluded
/// indices. Holds a reference; the dataset must outlive the view.
class DatasetView {
 public:
  DatasetView(const SparseDataset& ds) : ds_(&ds) {}  // NOLINT(google-explicit-constructor)
  /// `excluded` need not be sorted; duplicates and out-of-range indices throw.
  DatasetView(const SparseDataset& ds, std::vector<std::size_t> excluded);

  std::size_t size() const noexcept { return ds_->size() - excluded_.size(); }
  std::size_t dim() const noexcept { return ds_->dim(); }
  const SparseDataset& base() const noexcept { return *ds_; }
  std::span<const std::size_t> excluded() const noexcept { return excluded_; }

  /// Calls fn(base_index, row, label) for each included row in ascending order.
  template <class Fn>
  void for_each(Fn&& fn) const {
    auto skip = excluded_.begin();
    for (std::size_t i = 0; i < ds_->size(); ++i) {
      if (skip != excluded_.end() && *skip == i) {
        ++skip;
        continue;
      }
      fn(i, ds_->row(i), ds_->label(i));
    }
  }

 private:
  const SparseDataset* ds_;
  std::vector<std::size_t> excluded_;
};

/// Instances to add and base-row indices to remove.
struct UpdatePlan {
  std::vector<Instance> added;
  std::vector<std::size_t> removed;

  std::size_t n_added() const noexcept { return added.size(); }
  std::size_t n_removed() const noexcept { return removed.size(); }
  bool empty() const noexcept { return added.empty() && removed.empty(); }

  /// Throws if removals repeat or fall outside `base`, or if an added row does
  /// not fit base.dim().
  void validate(const SparseDataset& base) const;
};

/// Materializes the updated dataset: base rows minus `removed` (in original
/// order), followed by `added`. `base` is not modified.
SparseDataset apply_update(const SparseDataset& base, const UpdatePlan& plan);

/// Instances of `base` referenced by plan.removed, in plan order.
std::vector<Instance> removed_instances(const SparseDataset& base, const UpdatePlan& plan);

/// Two Gaussian clusters in R^d with unit covariance and means at
/// +-(separation / 2) * (1, ..., 1) / sqrt(d). Both labels are always present.
SparseDataset make_synthetic(std::uint64_t seed, std::size_t n, std::size_t d, double separation);

/// Random update: `n_removed` distinct rows of `base` and `n_added` instances
/// drawn from `pool` without replacement.
UpdatePlan make_random_update(std::uint64_t seed, const SparseDataset& base, std::size_t n_removed,
                              const SparseDataset& pool, std::size_t n_added);

/// Copy of `ds` with a constant 1 feature appended at index ds.dim().
SparseDataset with_bias(const SparseDataset& ds);

}  // namespace delta_scope
