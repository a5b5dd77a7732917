#include <openssl/evp.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <memory>

#include "json.hpp"
#include "ydde/cli.hpp"
#include "ydde/errors.hpp"

namespace ydde::cli {

std::string sha256_file(const std::filesystem::path& file) {
  std::ifstream is(file, std::ios::binary);
  if (!is) throw Error("cannot read '" + file.string() + "' for hashing");
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) throw Error("SHA-256 unavailable");
  std::array<char, 1 << 16> buf;
  while (is) {
    is.read(buf.data(), buf.size());
    if (is.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(is.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), md, &len);
  std::string hex;
  char two[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(two, sizeof two, "%02x", md[i]);
    hex += two;
  }
  return hex;
}

std::string manifest_to_line(const RunManifest& m) {
  nlohmann::json j;
  j["subcommand"] = m.subcommand;
  j["config"] = m.config;
  j["master_seed"] = m.master_seed;
  j["version"] = m.version;
  j["duration_seconds"] = m.duration_seconds;
  j["exit_code"] = m.exit_code;
  j["outputs"] = nlohmann::json::array();
  for (const auto& o : m.outputs) j["outputs"].push_back({{"file", o.file}, {"sha256", o.sha256}});
  return j.dump();
}

RunManifest manifest_from_line(const std::string& line) {
  try {
    const auto j = nlohmann::json::parse(line);
    RunManifest m;
    m.subcommand = j.at("subcommand").get<std::string>();
    m.config = j.at("config").get<std::map<std::string, std::string>>();
    m.master_seed = j.value("master_seed", std::uint64_t{0});
    m.version = j.value("version", std::string{});
    m.duration_seconds = j.value("duration_seconds", 0.0);
    m.exit_code = j.value("exit_code", 0);
    for (const auto& o : j.at("outputs")) {
      m.outputs.push_back({o.at("file").get<std::string>(), o.at("sha256").get<std::string>()});
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed manifest: ") + e.what());
  }
}

RunManifest read_manifest(const std::string& file) {
  std::ifstream is(file);
  if (!is) throw Error("cannot read manifest '" + file + "'");
  std::string line;
  while (std::getline(is, line)) {
    if (line.find_first_not_of(" \t\r") != std::string::npos) return manifest_from_line(line);
  }
  throw Error("manifest '" + file + "' is empty");
}

}  // namespace ydde::cli
