#include "squeezelab_cli/manifest.hpp"

#include <array>

#include <Eigen/Core>
#include <boost/version.hpp>
#include <fmt/format.h>
#include <openssl/evp.h>

namespace squeezelab::cli {

std::string sha256_hex(const std::string& bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw Error("sha256 digest failed");
  }
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

Manifest::Manifest(std::filesystem::path out_dir, std::string command, Json config)
    : out_dir_(std::move(out_dir)), command_(std::move(command)) {
  entry_["config"] = nlohmann::json::parse(config.dump());
  entry_["versions"] = {
      {"squeezelab", SQUEEZELAB_VERSION},
      {"eigen", fmt::format("{}.{}.{}", EIGEN_WORLD_VERSION, EIGEN_MAJOR_VERSION, EIGEN_MINOR_VERSION)},
      {"boost", BOOST_LIB_VERSION},
      {"fmt", FMT_VERSION},
  };
  entry_["seeds"] = nlohmann::json::object();
  entry_["files"] = nlohmann::json::object();
  entry_["status"] = "running";
}

std::filesystem::path Manifest::emit(const std::string& stage, const std::filesystem::path& relative,
                                     const std::string& text) {
  const std::filesystem::path path = out_dir_ / relative;
  write_text(path, text);
  entry_["files"][relative.generic_string()] = {{"stage", stage}, {"sha256", sha256_hex(text)}};
  return path;
}

void Manifest::set_seed(const std::string& name, std::uint64_t value) { entry_["seeds"][name] = value; }

void Manifest::set_status(const std::string& status) { entry_["status"] = status; }

void Manifest::save() const {
  const std::filesystem::path path = out_dir_ / "manifest.json";
  nlohmann::json doc = nlohmann::json::object();
  if (std::filesystem::exists(path)) {
    try {
      doc = nlohmann::json::parse(read_text(path));
    } catch (const nlohmann::json::parse_error&) {
      doc = nlohmann::json::object();
    }
  }
  doc["runs"][command_] = entry_;
  write_text(path, doc.dump(2) + "\n");
}

}  // namespace squeezelab::cli
