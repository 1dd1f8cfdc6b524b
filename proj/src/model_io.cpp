#include "delta_scope/model_io.hpp"

#include <openssl/evp.h>

#include <bit>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>

#include <json.hpp>

namespace delta_scope {

namespace {

constexpr std::string_view kFormat = "delta-scope-model";
constexpr int kVersion = 1;

}  // namespace

std::string base64_encode(std::string_view bytes) {
  std::string out(4 * ((bytes.size() + 2) / 3), '\0');
  const int written = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                                      reinterpret_cast<const unsigned char*>(bytes.data()),
                                      static_cast<int>(bytes.size()));
  out.resize(static_cast<std::size_t>(written));
  return out;
}

std::string base64_decode(std::string_view text) {
  if (text.size() % 4 != 0) throw Error("base64 length is not a multiple of 4");
  std::string out(3 * text.size() / 4, '\0');
  const int written = EVP_DecodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                                      reinterpret_cast<const unsigned char*>(text.data()),
                                      static_cast<int>(text.size()));
  if (written < 0) throw Error("invalid base64 payload");
  std::size_t padding = 0;
  if (!text.empty() && text.back() == '=') ++padding;
  if (text.size() > 1 && text[text.size() - 2] == '=') ++padding;
  out.resize(static_cast<std::size_t>(written) - padding);
  return out;
}

std::string model_to_json(const TrainedModel& model) {
  std::string raw;
  raw.reserve(8 * model.beta.size());
  for (double v : model.beta) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int b = 0; b < 8; ++b) raw.push_back(static_cast<char>((bits >> (8 * b)) & 0xffu));
  }
  nlohmann::ordered_json j;
  j["format"] = kFormat;
  j["version"] = kVersion;
  j["dim"] = model.dim();
  j["loss"] = to_string(model.kind);
  j["lambda"] = model.lambda;
  j["has_bias"] = model.has_bias;
  j["n_train"] = model.n_train;
  j["grad_residual"] = model.grad_residual;
  j["beta_f64le_base64"] = base64_encode(raw);
  j["beta"] = model.beta;
  return j.dump(2) + "\n";
}

TrainedModel model_from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("model file is not valid JSON: ") + e.what());
  }
  try {
    if (j.at("format").get<std::string>() != kFormat) throw Error("not a delta-scope model file");
    if (j.at("version").get<int>() != kVersion) throw Error("unsupported model version");
    TrainedModel model;
    model.kind = parse_loss_kind(j.at("loss").get<std::string>());
    model.lambda = j.at("lambda").get<double>();
    model.has_bias = j.at("has_bias").get<bool>();
    model.n_train = j.at("n_train").get<std::size_t>();
    model.grad_residual = j.at("grad_residual").get<double>();
    const auto dim = j.at("dim").get<std::size_t>();
    const auto raw = base64_decode(j.at("beta_f64le_base64").get<std::string>());
    if (raw.size() != 8 * dim) throw Error("beta payload does not match dim");
    model.beta.resize(dim);
    for (std::size_t k = 0; k < dim; ++k) {
      std::uint64_t bits = 0;
      for (int b = 0; b < 8; ++b) {
        bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(raw[8 * k + static_cast<std::size_t>(b)]))
                << (8 * b);
      }
      model.beta[k] = std::bit_cast<double>(bits);
    }
    if (!(model.lambda > 0.0)) throw Error("model lambda must be positive");
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed model file: ") + e.what());
  }
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw Error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void save_model(const std::filesystem::path& path, const TrainedModel& model) {
  write_file_atomic(path, model_to_json(model));
}

TrainedModel load_model(const std::filesystem::path& path) { return model_from_json(read_file(path)); }

std::string sha256_file(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("sha256 failed for " + path.string());
  }
  std::ostringstream hex;
  for (unsigned int k = 0; k < len; ++k) {
    hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[k]);
  }
  return hex.str();
}

}  // namespace delta_scope
