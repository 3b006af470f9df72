#include "output.hpp"

#include <iomanip>
#include <sstream>
#include <stdexcept>

#include <openssl/evp.h>

namespace semimarkov::cli {

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 digest failed");
  }
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  return os.str();
}

ArtifactWriter::ArtifactWriter(std::string prefix, std::string config_digest)
    : prefix_(std::move(prefix)), digest_(std::move(config_digest)) {}

std::filesystem::path ArtifactWriter::path_for(const std::string& name) const {
  return std::filesystem::path(prefix_ + "_" + name);
}

namespace {

std::ofstream open_checked(const std::filesystem::path& path) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) throw std::runtime_error("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  return os;
}

}  // namespace

std::ofstream ArtifactWriter::open_table(const std::string& name) {
  auto os = open_checked(path_for(name));
  os << "# " << kArtifactVersion << " config-sha256=" << digest_ << '\n';
  return os;
}

void ArtifactWriter::close(std::ofstream& os, const std::string& name) {
  os.flush();
  if (!os) throw std::runtime_error("write failed: " + path_for(name).string());
  os.close();
  written_.push_back(path_for(name));
}

void ArtifactWriter::write_json(const std::string& name, nlohmann::json doc) {
  nlohmann::json out;
  out["artifact"] = {{"version", kArtifactVersion}, {"config_sha256", digest_}};
  for (auto& [k, v] : doc.items()) out[k] = std::move(v);
  auto os = open_checked(path_for(name));
  os << out.dump(2) << '\n';
  close(os, name);
}

}  // namespace semimarkov::cli
