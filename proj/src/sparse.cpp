#include "delta_scope/sparse.hpp"

#include <cmath>
#include <string>

#include "delta_scope/error.hpp"

namespace delta_scope {

namespace {

void check_fits(SparseRow x, std::size_t dim) {
  if (!x.empty() && x.back().index >= dim) {
    throw DimensionError("sparse index " + std::to_string(x.back().index) +
                         " out of range for dimension " + std::to_string(dim));
  }
}

}  // namespace

double dot(SparseRow x, std::span<const double> dense) {
  check_fits(x, dense.size());
  double acc = 0.0;
  for (const auto& e : x) {
    acc += e.value * dense[e.index];
  }
  return acc;
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw DimensionError("dot: lengths " + std::to_string(a.size()) + " and " +
                         std::to_string(b.size()));
  }
  double acc = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    acc += a[j] * b[j];
  }
  return acc;
}

void axpy(double alpha, SparseRow x, std::span<double> y) {
  check_fits(x, y.size());
  for (const auto& e : x) {
    y[e.index] += alpha * e.value;
  }
}

double squared_norm(SparseRow x) {
  double acc = 0.0;
  for (const auto& e : x) {
    acc += e.value * e.value;
  }
  return acc;
}

double norm(SparseRow x) { return std::sqrt(squared_norm(x)); }

double norm(std::span<const double> v) { return std::sqrt(dot(v, v)); }

std::uint32_t extent(SparseRow x) { return x.empty() ? 0 : x.back().index + 1; }

bool is_canonical(SparseRow x) {
  for (std::size_t k = 1; k < x.size(); ++k) {
    if (x[k].index <= x[k - 1].index) {
      return false;
    }
  }
  return true;
}

DenseVector to_dense(SparseRow x, std::size_t dim) {
  check_fits(x, dim);
  DenseVector out(dim, 0.0);
  for (const auto& e : x) {
    out[e.index] = e.value;
  }
  return out;
}

}  // namespace delta_scope
