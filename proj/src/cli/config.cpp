#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "ydde/cli.hpp"
#include "ydde/coefficients.hpp"
#include "ydde/errors.hpp"
#include "ydde/fbm.hpp"
#include "ydde/grid.hpp"
#include "ydde/solver.hpp"

namespace ydde::cli {

namespace {

const KeySpec kOutDir{"out_dir", Kind::text, "out", "directory receiving every output file"};
const KeySpec kHurst{"hurst", Kind::real, "0.75", "Hurst parameter H"};
const KeySpec kAlpha{"alpha", Kind::real, "0.3", "norm exponent alpha"};
const KeySpec kHorizon{"T", Kind::real, "1", "time horizon"};
const KeySpec kSteps{"n", Kind::count, "4096", "steps on [0, T]"};
const KeySpec kMethod{"method", Kind::text, "circulant-embedding", "fBm method: exact-cholesky | circulant-embedding"};
const KeySpec kPreset{"preset", Kind::text, "sine", "coefficient preset"};
const KeySpec kEta{"eta", Kind::text, "constant", "initial segment preset"};

std::map<std::string, std::vector<KeySpec>> build_schemas() {
  std::map<std::string, std::vector<KeySpec>> s;
  s["fbm"] = {kOutDir, kHurst, kHorizon, kSteps,
              {"r", Kind::real, "0", "history length; the path is 0 on [-r, 0]"},
              {"m", Kind::count, "1", "number of independent components"},
              {"seed", Kind::seed, "1", "master seed"},
              kMethod};
  s["norms"] = {kOutDir,
                {"input", Kind::text, "", "path CSV"},
                {"driver", Kind::text, "", "driver CSV for Lambda_alpha and norm_1ma (default: input)"},
                kAlpha,
                {"lambda", Kind::real, "1", "weight of the exponential norm"},
                {"delta", Kind::real, "1", "exponent of Delta_r"},
                {"r", Kind::text, "", "restrict to [-r, T] (default: the whole input grid)"}};
  s["integrate"] = {kOutDir,
                    {"f", Kind::text, "", "integrand CSV (d*m components)"},
                    {"g", Kind::text, "", "driver CSV (m components)"},
                    kAlpha};
  s["solve"] = {kOutDir, kHurst, kAlpha, kHorizon, kSteps,
                {"r", Kind::real, "0", "delay"},
                {"scheme", Kind::text, "euler", "euler | picard"},
                {"seed", Kind::seed, "1", "master seed"},
                kMethod, kPreset, kEta,
                {"lambda", Kind::real, "0", "Picard weight (0: automatic)"},
                {"delta", Kind::real, "1", "exponent of Delta_r in the report"},
                {"picard_tol", Kind::real, "1e-8", "Picard stopping tolerance"},
                {"picard_max_iter", Kind::count, "50", "Picard iteration cap"},
                {"driver", Kind::text, "", "driver CSV (default: generated from seed)"}};
  s["converge"] = {kOutDir, kHurst, kAlpha, kHorizon, kSteps,
                   {"seed", Kind::seed, "20080101", "master seed"},
                   kMethod, kPreset, kEta,
                   {"delays", Kind::reals, "", "comma separated delays (default: T 2^-k, k = 2..8)"},
                   {"p_list", Kind::reals, "1,2", "moment orders"},
                   {"n_seeds", Kind::count, "100", "number of drivers"},
                   {"parallelism", Kind::count, "1", "worker threads"}};
  return s;
}

const std::map<std::string, std::vector<KeySpec>>& schemas() {
  static const auto s = build_schemas();
  return s;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string env_name(const std::string& key) {
  std::string out = kEnvPrefix;
  for (char c : key) out += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

double parse_real(const std::string& key, const std::string& v) {
  const std::string t = trim(v);
  char* end = nullptr;
  errno = 0;
  const double x = std::strtod(t.c_str(), &end);
  if (t.empty() || *end != '\0' || errno == ERANGE || !std::isfinite(x)) {
    throw ConfigError("'" + key + "' expects a finite real number, got '" + v + "'");
  }
  return x;
}

long parse_count(const std::string& key, const std::string& v) {
  const std::string t = trim(v);
  char* end = nullptr;
  errno = 0;
  const long x = std::strtol(t.c_str(), &end, 10);
  if (t.empty() || *end != '\0' || errno == ERANGE) {
    throw ConfigError("'" + key + "' expects an integer, got '" + v + "'");
  }
  return x;
}

std::uint64_t parse_seed(const std::string& key, const std::string& v) {
  const std::string t = trim(v);
  char* end = nullptr;
  errno = 0;
  const unsigned long long x = std::strtoull(t.c_str(), &end, 10);
  if (t.empty() || t[0] == '-' || *end != '\0' || errno == ERANGE) {
    throw ConfigError("'" + key + "' expects a non-negative integer, got '" + v + "'");
  }
  return x;
}

std::vector<double> parse_reals(const std::string& key, const std::string& v) {
  std::vector<double> out;
  if (trim(v).empty()) return out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_real(key, item));
  return out;
}

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

void validate(const Config& c) {
  for (const auto& spec : schema(c.subcommand())) {
    switch (spec.kind) {
      case Kind::real: c.real(spec.key); break;
      case Kind::count: c.count(spec.key); break;
      case Kind::seed: c.seed(spec.key); break;
      case Kind::reals: c.reals(spec.key); break;
      case Kind::text: break;
    }
  }
  const std::string& sub = c.subcommand();
  require(!c.empty("out_dir"), "out_dir must not be empty");
  const auto& v = c.values();
  auto has = [&](const char* k) { return v.count(k) > 0; };

  if (has("T")) require(c.real("T") > 0.0, "T must be positive");
  if (has("n")) require(c.count("n") >= 2, "n must be at least 2");
  if (has("method")) parse_fbm_method(c.text("method"));
  if (has("hurst")) {
    const double H = c.real("hurst");
    if (sub == "fbm") require(H > 0.0 && H < 1.0, "hurst must lie in (0, 1)");
    else require(H > 0.5 && H < 1.0, "hurst must lie in (1/2, 1)");
  }
  if (sub == "fbm") require(c.count("m") >= 1, "m must be at least 1");

  if (sub == "norms" || sub == "integrate") {
    const double a = c.real("alpha");
    require(a > 0.0 && a < 0.5, "alpha must lie in (0, 1/2)");
  }
  if (sub == "norms") {
    require(!c.empty("input"), "norms needs 'input'");
    require(c.real("lambda") >= 1.0, "lambda must be at least 1");
    require(c.real("delta") > 0.0 && c.real("delta") <= 1.0, "delta must lie in (0, 1]");
    if (!c.empty("r")) require(parse_real("r", c.text("r")) >= 0.0, "r must be non-negative");
  }
  if (sub == "integrate") require(!c.empty("f") && !c.empty("g"), "integrate needs 'f' and 'g'");

  if (sub == "solve" || sub == "converge") {
    const CoefficientSet coeffs = make_preset(c.text("preset"));
    make_eta_preset(c.text("eta"));
    const double H = c.real("hurst");
    const double a = c.real("alpha");
    const double a0 = coeffs.alpha_zero();
    if (!(a > 1.0 - H && a < a0)) {
      std::ostringstream msg;
      msg << "alpha=" << a << " violates the existence condition alpha in (1 - H, alpha_0) = (" << 1.0 - H << ", "
          << a0 << ")";
      throw ConfigError(msg.str());
    }
  }
  if (sub == "solve") {
    require(c.real("r") >= 0.0, "r must be non-negative");
    parse_scheme(c.text("scheme"));
    require(c.real("lambda") == 0.0 || c.real("lambda") >= 1.0, "lambda must be 0 (automatic) or at least 1");
    require(c.real("delta") > 0.0 && c.real("delta") <= 1.0, "delta must lie in (0, 1]");
    require(c.real("picard_tol") > 0.0, "picard_tol must be positive");
    require(c.count("picard_max_iter") >= 1, "picard_max_iter must be at least 1");
    try {
      make_grid(c.real("T"), static_cast<std::size_t>(c.count("n")), c.real("r"));
    } catch (const DelayNotAligned& e) {
      throw ConfigError(e.what());
    }
  }
  if (sub == "converge") {
    require(c.count("n_seeds") >= 30, "n_seeds must be at least 30");
    require(c.count("parallelism") >= 1, "parallelism must be at least 1");
    const auto p = c.reals("p_list");
    require(!p.empty() && std::all_of(p.begin(), p.end(), [](double x) { return x > 0.0; }),
            "p_list needs positive entries");
    const auto delays = c.reals("delays");
    require(delays.empty() || delays.size() >= 4, "delays needs at least four entries");
    const auto n = static_cast<std::size_t>(c.count("n"));
    for (double r : delays) {
      require(r > 0.0, "delays must be positive");
      try {
        make_grid(c.real("T"), n, r);
      } catch (const DelayNotAligned& e) {
        throw ConfigError(e.what());
      }
    }
  }
}

}  // namespace

std::vector<std::string> subcommand_names() { return {"fbm", "norms", "integrate", "solve", "converge"}; }

const std::vector<KeySpec>& schema(const std::string& subcommand) {
  const auto it = schemas().find(subcommand);
  if (it == schemas().end()) throw ConfigError("unknown subcommand '" + subcommand + "'");
  return it->second;
}

Config::Config(std::string subcommand, std::map<std::string, std::string> values)
    : subcommand_(std::move(subcommand)), values_(std::move(values)) {}

const std::string& Config::text(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("'" + key + "' is not a key of '" + subcommand_ + "'");
  return it->second;
}

double Config::real(const std::string& key) const { return parse_real(key, text(key)); }
long Config::count(const std::string& key) const { return parse_count(key, text(key)); }
std::uint64_t Config::seed(const std::string& key) const { return parse_seed(key, text(key)); }
std::vector<double> Config::reals(const std::string& key) const { return parse_reals(key, text(key)); }

std::map<std::string, std::string> parse_config_text(std::istream& is) {
  std::map<std::string, std::string> out;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) + " is not of the form key=value");
    }
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + " has an empty key");
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

std::map<std::string, std::string> parse_config_file(const std::string& file) {
  std::ifstream is(file);
  if (!is) throw ConfigError("cannot read config file '" + file + "'");
  return parse_config_text(is);
}

Config resolve_config(const std::string& subcommand, const ConfigSources& sources) {
  const auto& keys = schema(subcommand);
  auto known = [&](const std::string& k) {
    return std::any_of(keys.begin(), keys.end(), [&](const KeySpec& s) { return s.key == k; });
  };

  std::map<std::string, std::string> values;
  for (const auto& s : keys) values[s.key] = s.default_value;

  const auto getenv = sources.getenv ? sources.getenv : [](const char* n) -> const char* { return std::getenv(n); };
  for (const auto& s : keys) {
    if (const char* e = getenv(env_name(s.key).c_str())) values[s.key] = e;
  }
  if (sources.file) {
    for (const auto& [k, v] : parse_config_file(*sources.file)) {
      if (!known(k)) throw ConfigError("unknown key '" + k + "' for '" + subcommand + "' in " + *sources.file);
      values[k] = v;
    }
  }
  for (const auto& [k, v] : sources.flags) {
    if (!known(k)) throw ConfigError("unknown key '" + k + "' for '" + subcommand + "'");
    values[k] = v;
  }
  Config c(subcommand, std::move(values));
  validate(c);
  return c;
}

}  // namespace ydde::cli
