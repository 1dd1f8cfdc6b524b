#include "report.hpp"

#include <charconv>
#include <cmath>

#include "delta_scope/error.hpp"
#include "delta_scope/model_io.hpp"

namespace delta_scope::cli {

namespace {

void require_finite(const Json& j, const std::string& where) {
  if (j.is_number_float()) {
    if (!std::isfinite(j.get<double>())) throw Error("report value at " + where + " is not finite");
  } else if (j.is_object()) {
    for (const auto& [key, value] : j.items()) require_finite(value, where + "/" + key);
  } else if (j.is_array()) {
    for (std::size_t k = 0; k < j.size(); ++k) require_finite(j[k], where + "/" + std::to_string(k));
  }
}

}  // namespace

Report::Report(std::string command, std::vector<std::string> args)
    : command_(std::move(command)), args_(std::move(args)) {}

void Report::add_input(std::string role, const std::filesystem::path& path) {
  inputs_.push_back({{"role", std::move(role)}, {"path", path.string()}, {"sha256", sha256_file(path)}});
}

std::string Report::dump() const {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["command"] = {{"name", command_}, {"args", args_}};
  j["inputs"] = {{"files", inputs_}, {"seed", seed_ ? Json(*seed_) : Json(nullptr)}};
  j["results"] = results_;
  j["warnings"] = warnings_;
  require_finite(j, "");
  return j.dump(2) + "\n";
}

std::string csv_field(std::string_view text) {
  if (text.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(text);
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string csv_number(double value) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

std::string csv_row(const std::vector<std::string>& fields) {
  std::string line;
  for (std::size_t k = 0; k < fields.size(); ++k) {
    if (k) line += ',';
    line += csv_field(fields[k]);
  }
  line += "\r\n";
  return line;
}

}  // namespace delta_scope::cli
