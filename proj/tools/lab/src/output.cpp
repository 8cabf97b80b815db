#include "divgrad/lab/output.hpp"

#include <openssl/evp.h>

#include <array>
#include <fstream>
#include "json.hpp"

#include "divgrad/errors.hpp"

namespace divgrad::lab {

const char* tool_version() noexcept { return DIVGRAD_VERSION; }

std::string sha256_hex(const std::string& bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw Error("sha256: digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[md[i] >> 4];
    out += kHex[md[i] & 15];
  }
  return out;
}

std::string provenance_header(const std::string& command, const std::string& config_hash,
                              const std::string& seed) {
  return std::string("# tool: ") + kToolName + "\n# version: " + tool_version() +
         "\n# command: " + command + "\n# config_hash: " + config_hash + "\n# seed: " + seed + "\n";
}

OutputSink::OutputSink(std::filesystem::path dir, std::string command, std::string config_hash,
                       std::string seed)
    : dir_(std::move(dir)), command_(std::move(command)), hash_(std::move(config_hash)),
      seed_(std::move(seed)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw IoError("cannot create output directory " + dir_.string() + ": " + ec.message());
}

void OutputSink::write_text(const std::string& name, const std::string& text) {
  const auto path = dir_ / name;
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  out.close();
  if (!out) throw IoError("write failed for " + path.string());
  for (auto& f : files_) {
    if (f.path == name) {
      f = {name, sha256_hex(text), text.size()};
      return;
    }
  }
  files_.push_back({name, sha256_hex(text), text.size()});
}

void OutputSink::write_csv(const std::string& name, const CsvTable& table) {
  write_text(name, provenance_header(command_, hash_, seed_) + table.str());
}

void OutputSink::finish() {
  nlohmann::ordered_json j;
  j["tool"] = kToolName;
  j["version"] = tool_version();
  j["command"] = command_;
  j["config_hash"] = hash_;
  j["seed"] = seed_;
  j["files"] = nlohmann::ordered_json::array();
  for (const auto& f : files_) {
    j["files"].push_back({{"path", f.path}, {"sha256", f.sha256}, {"bytes", f.bytes}});
  }
  const auto path = dir_ / "manifest.json";
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << j.dump(2) << "\n";
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace divgrad::lab
