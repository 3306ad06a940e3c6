#pragma once

#include <filesystem>
#include <string>

#include "squeezelab/io.hpp"

namespace squeezelab::cli {

std::string sha256_hex(const std::string& bytes);

// Record of one command invocation: config echo, library versions, seeds and
// a checksum per emitted file. Contains no timestamps, so identical runs give
// identical manifests.
class Manifest {
 public:
  Manifest(std::filesystem::path out_dir, std::string command, Json config);

  /// Writes `text` to out_dir/relative and records its checksum under `stage`.
  std::filesystem::path emit(const std::string& stage, const std::filesystem::path& relative, const std::string& text);
  void set_seed(const std::string& name, std::uint64_t value);
  void set_status(const std::string& status);

  /// Merges this command's entry into out_dir/manifest.json.
  void save() const;

  const std::filesystem::path& out_dir() const { return out_dir_; }

 private:
  std::filesystem::path out_dir_;
  std::string command_;
  nlohmann::json entry_;
};

}  // namespace squeezelab::cli
