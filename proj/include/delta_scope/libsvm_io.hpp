#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

#include "delta_scope/dataset.hpp"

namespace delta_scope {

struct ParseOptions {
  /// Feature dimension to use instead of the largest index seen. Rows with a
  /// larger index are rejected.
  std::optional<std::size_t> dim;
  /// Append a constant-1 feature at index `dim` (after any pinning).
  bool add_bias = false;
};

/// Parses libsvm text: one `<label> <idx>:<val> ...` record per nonempty line,
/// 1-based ascending indices. Positive labels map to +1, everything else to
/// -1. LF and CRLF line endings are accepted; `#` starts a comment.
SparseDataset parse_libsvm(std::string_view text, const ParseOptions& options = {});
SparseDataset read_libsvm_file(const std::filesystem::path& path, const ParseOptions& options = {});

/// Writes labels as +1/-1 and values in shortest round-trip form, so
/// parse_libsvm(write_libsvm(ds)) == ds.
void write_libsvm(std::ostream& out, const SparseDataset& ds);
std::string to_libsvm_string(const SparseDataset& ds);

}  // namespace delta_scope
