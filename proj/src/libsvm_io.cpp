#include "delta_scope/libsvm_io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>
#include <vector>

#include "delta_scope/error.hpp"

namespace delta_scope {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f'; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::string_view next_token(std::string_view& rest) {
  while (!rest.empty() && is_space(rest.front())) rest.remove_prefix(1);
  std::size_t k = 0;
  while (k < rest.size() && !is_space(rest[k])) ++k;
  auto tok = rest.substr(0, k);
  rest.remove_prefix(k);
  return tok;
}

double parse_real(std::string_view tok, std::size_t line, const char* what) {
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
    throw ParseError(line, std::string("invalid ") + what + " '" + std::string(tok) + "'");
  }
  return v;
}

struct ParsedLine {
  std::size_t line;
  int label;
  std::size_t begin;
  std::size_t end;
};

}  // namespace

SparseDataset parse_libsvm(std::string_view text, const ParseOptions& options) {
  std::vector<ParsedLine> lines;
  std::vector<SparseEntry> entries;
  std::uint32_t max_extent = 0;

  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    auto line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;

    const auto label_tok = next_token(line);
    const double label = parse_real(label_tok, line_no, "label");
    const std::size_t begin = entries.size();
    std::uint32_t prev = 0;
    while (true) {
      const auto tok = next_token(line);
      if (tok.empty()) break;
      const auto colon = tok.find(':');
      if (colon == std::string_view::npos) {
        throw ParseError(line_no, "expected <index>:<value>, got '" + std::string(tok) + "'");
      }
      std::uint32_t idx = 0;
      const auto idx_str = tok.substr(0, colon);
      const auto [ptr, ec] = std::from_chars(idx_str.data(), idx_str.data() + idx_str.size(), idx);
      if (ec != std::errc{} || ptr != idx_str.data() + idx_str.size() || idx == 0) {
        throw ParseError(line_no, "invalid feature index '" + std::string(idx_str) + "'");
      }
      if (idx <= prev) {
        throw ParseError(line_no, "feature indices must be strictly ascending");
      }
      prev = idx;
      entries.push_back({idx - 1, parse_real(tok.substr(colon + 1), line_no, "feature value")});
    }
    max_extent = std::max(max_extent, prev);
    if (options.dim && prev > *options.dim) {
      throw ParseError(line_no, "feature index " + std::to_string(prev) + " exceeds dimension " +
                                    std::to_string(*options.dim));
    }
    lines.push_back({line_no, label > 0.0 ? 1 : -1, begin, entries.size()});
  }
  if (lines.empty()) {
    throw ParseError(0, "empty libsvm input");
  }

  const std::size_t dim = options.dim.value_or(max_extent);
  SparseDataset ds(dim + (options.add_bias ? 1 : 0));
  SparseVector row;
  for (const auto& pl : lines) {
    row.assign(entries.begin() + static_cast<std::ptrdiff_t>(pl.begin),
               entries.begin() + static_cast<std::ptrdiff_t>(pl.end));
    if (options.add_bias) {
      row.push_back({static_cast<std::uint32_t>(dim), 1.0});
    }
    ds.push_back(row, pl.label);
  }
  return ds;
}

SparseDataset read_libsvm_file(const std::filesystem::path& path, const ParseOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error("cannot open " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_libsvm(buf.str(), options);
  } catch (const ParseError& e) {
    throw ParseError(path.string(), e);
  }
}

void write_libsvm(std::ostream& out, const SparseDataset& ds) {
  char buf[64];
  for (std::size_t i = 0; i < ds.size(); ++i) {
    out << (ds.label(i) > 0 ? "+1" : "-1");
    for (const auto& e : ds.row(i)) {
      const auto res = std::to_chars(buf, buf + sizeof(buf), e.value);
      out << ' ' << (e.index + 1) << ':' << std::string_view(buf, static_cast<std::size_t>(res.ptr - buf));
    }
    out << '\n';
  }
}

std::string to_libsvm_string(const SparseDataset& ds) {
  std::ostringstream out;
  write_libsvm(out, ds);
  return out.str();
}

}  // namespace delta_scope
