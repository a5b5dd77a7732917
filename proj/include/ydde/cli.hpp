#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ydde::cli {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kEnvPrefix = "YDDE_";

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitGateFailure = 3;

enum class Kind { real, count, seed, text, reals };

struct KeySpec {
  std::string key;
  Kind kind = Kind::text;
  std::string default_value;
  std::string help;
};

std::vector<std::string> subcommand_names();

/// Keys accepted by a subcommand, with their defaults. Throws ConfigError for unknown subcommands.
const std::vector<KeySpec>& schema(const std::string& subcommand);

/// A fully resolved, validated configuration: every schema key has a value.
class Config {
 public:
  Config(std::string subcommand, std::map<std::string, std::string> values);

  const std::string& subcommand() const { return subcommand_; }
  const std::map<std::string, std::string>& values() const { return values_; }

  const std::string& text(const std::string& key) const;
  double real(const std::string& key) const;
  long count(const std::string& key) const;
  std::uint64_t seed(const std::string& key) const;
  std::vector<double> reals(const std::string& key) const;
  bool empty(const std::string& key) const { return text(key).empty(); }

 private:
  std::string subcommand_;
  std::map<std::string, std::string> values_;
};

/// Flat `key = value` lines; `#` starts a comment, blank lines are skipped.
std::map<std::string, std::string> parse_config_text(std::istream& is);
std::map<std::string, std::string> parse_config_file(const std::string& file);

struct ConfigSources {
  std::optional<std::string> file;
  std::map<std::string, std::string> flags;
  std::function<const char*(const char*)> getenv;  // defaults to std::getenv
};

/// defaults < YDDE_* environment < file < flags. Unknown keys, malformed values
/// and constraint violations throw ConfigError.
Config resolve_config(const std::string& subcommand, const ConfigSources& sources);

/// Hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& file);

struct OutputDigest {
  std::string file;  // relative to out_dir
  std::string sha256;
};

struct RunManifest {
  std::string subcommand;
  std::map<std::string, std::string> config;
  std::uint64_t master_seed = 0;
  std::string version = kVersion;
  double duration_seconds = 0;
  int exit_code = 0;
  std::vector<OutputDigest> outputs;
};

inline constexpr const char* kManifestName = "manifest.jsonl";

std::string manifest_to_line(const RunManifest& m);
RunManifest manifest_from_line(const std::string& line);
RunManifest read_manifest(const std::string& file);

/// Runs one subcommand into config's out_dir, writes the manifest next to the
/// outputs and returns it. Messages go to `log`.
RunManifest run_config(const Config& config, std::ostream& log);

/// Re-runs a manifest (optionally into another directory) and compares digests.
/// Returns kExitOk when every output is byte-identical.
int replay(const std::string& manifest_file, const std::optional<std::string>& out_dir, std::ostream& log);

/// Entry point of the `ydde` binary.
int run(int argc, char** argv);

}  // namespace ydde::cli
