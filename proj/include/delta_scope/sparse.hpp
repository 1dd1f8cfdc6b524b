#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace delta_scope {

/// One nonzero of a sparse vector. Indices are 0-based.
struct SparseEntry {
  std::uint32_t index = 0;
  double value = 0.0;

  friend bool operator==(const SparseEntry&, const SparseEntry&) = default;
};

/// Non-owning view of a sparse vector with strictly increasing indices.
using SparseRow = std::span<const SparseEntry>;
using SparseVector = std::vector<SparseEntry>;
using DenseVector = std::vector<double>;

double dot(SparseRow x, std::span<const double> dense);
double dot(std::span<const double> a, std::span<const double> b);

/// y += alpha * x
void axpy(double alpha, SparseRow x, std::span<double> y);

double squared_norm(SparseRow x);
double norm(SparseRow x);
double norm(std::span<const double> v);

/// Largest index + 1, or 0 for an empty row.
std::uint32_t extent(SparseRow x);

/// True when indices are strictly increasing.
bool is_canonical(SparseRow x);

/// Expands `x` to a dense vector of length `dim`.
DenseVector to_dense(SparseRow x, std::size_t dim);

}  // namespace delta_scope
