#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "divgrad/csv.hpp"

namespace divgrad::lab {

inline constexpr const char* kToolName = "divgrad-lab";
const char* tool_version() noexcept;

std::string sha256_hex(const std::string& bytes);

struct EmittedFile {
  std::string path;  // relative to the output directory
  std::string sha256;
  std::size_t bytes = 0;
};

/// Writes the files of one run below `dir` and keeps the manifest.
/// Every CSV gets the provenance header (tool, version, command, config
/// hash, seed) ahead of its own metadata.
class OutputSink {
 public:
  OutputSink(std::filesystem::path dir, std::string command, std::string config_hash,
             std::string seed);

  void write_csv(const std::string& name, const CsvTable& table);
  void write_text(const std::string& name, const std::string& text);

  /// Writes manifest.json (not listed in itself).
  void finish();

  const std::vector<EmittedFile>& files() const noexcept { return files_; }
  const std::filesystem::path& dir() const noexcept { return dir_; }

 private:
  std::filesystem::path dir_;
  std::string command_, hash_, seed_;
  std::vector<EmittedFile> files_;
};

/// Provenance header prepended by OutputSink, exposed for tests.
std::string provenance_header(const std::string& command, const std::string& config_hash,
                              const std::string& seed);

}  // namespace divgrad::lab
