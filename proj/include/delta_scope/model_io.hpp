#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "delta_scope/solver.hpp"

namespace delta_scope {

/// Serializes a model as JSON. beta is stored twice: base64 of little-endian
/// IEEE-754 doubles (authoritative, bit exact) and as a readable array.
std::string model_to_json(const TrainedModel& model);
TrainedModel model_from_json(std::string_view text);

/// Atomic write (temp file + rename).
void save_model(const std::filesystem::path& path, const TrainedModel& model);
TrainedModel load_model(const std::filesystem::path& path);

/// Writes `contents` to a sibling temp file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);
std::string read_file(const std::filesystem::path& path);

/// Lowercase hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

std::string base64_encode(std::string_view bytes);
std::string base64_decode(std::string_view text);

}  // namespace delta_scope
