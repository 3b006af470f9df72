#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace semimarkov::cli {

inline constexpr const char* kArtifactVersion = "semimarkov-artifact/1";

std::string sha256_hex(const std::string& bytes);

/// Writes `<prefix>_<name>` files. Delimited files start with the comment
/// line `# <artifact version> config-sha256=<digest>`; JSON documents carry
/// the same data under the "artifact" key.
class ArtifactWriter {
 public:
  ArtifactWriter(std::string prefix, std::string config_digest);

  /// Opens a delimited file with the header line already written.
  std::ofstream open_table(const std::string& name);
  void write_json(const std::string& name, nlohmann::json doc);
  void close(std::ofstream& os, const std::string& name);

  const std::vector<std::filesystem::path>& written() const { return written_; }
  std::filesystem::path path_for(const std::string& name) const;

 private:
  std::string prefix_;
  std::string digest_;
  std::vector<std::filesystem::path> written_;
};

}  // namespace semimarkov::cli
