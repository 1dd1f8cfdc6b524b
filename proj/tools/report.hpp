#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace delta_scope::cli {

inline constexpr std::string_view kSchemaVersion = "1.0";

using Json = nlohmann::ordered_json;

// Machine-readable record of one command run. Timings aside, the same inputs
// and seed produce the same report.
class Report {
 public:
  Report(std::string command, std::vector<std::string> args);

  // Hashes the file now so the digest matches what was actually read.
  void add_input(std::string role, const std::filesystem::path& path);
  void set_seed(std::uint64_t seed) { seed_ = seed; }
  void warn(std::string message) { warnings_.push_back(std::move(message)); }

  Json& results() { return results_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

  // Throws if any number in the report is NaN or infinite.
  std::string dump() const;

 private:
  std::string command_;
  std::vector<std::string> args_;
  Json inputs_ = Json::array();
  std::optional<std::uint64_t> seed_;
  Json results_ = Json::object();
  std::vector<std::string> warnings_;
};

// RFC 4180 output with '.' decimals regardless of locale.
std::string csv_field(std::string_view text);
std::string csv_number(double value);
std::string csv_row(const std::vector<std::string>& fields);

}  // namespace delta_scope::cli
