#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace delta_scope::cli {

// Runs `delta-scope` with `args` (program name excluded) and returns the exit
// code: 0 on success, 1 on a runtime error, 2 on a usage error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// "2^a..2^b" expands to every integer exponent in between; otherwise a
// comma-separated list of numbers or 2^k terms.
std::vector<double> parse_grid(std::string_view text);

// Newline-separated 0-based row indices; blank lines and '#' comments allowed.
std::vector<std::size_t> read_index_file(const std::filesystem::path& path);

// `requested` threads (0 means all cores), capped by DELTA_SCOPE_THREADS.
unsigned resolve_threads(unsigned requested);

}  // namespace delta_scope::cli
