#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "ydde/cli.hpp"
#include "ydde/coefficients.hpp"
#include "ydde/convergence.hpp"
#include "ydde/csv.hpp"
#include "ydde/errors.hpp"
#include "ydde/fbm.hpp"
#include "ydde/frac_norms.hpp"
#include "ydde/solver.hpp"
#include "ydde/young.hpp"

namespace ydde::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class Outputs {
 public:
  explicit Outputs(const Config& c) : dir_(c.text("out_dir")) { fs::create_directories(dir_); }

  fs::path open(const std::string& name) {
    const fs::path rel(name);
    if (rel.is_absolute() || rel.has_parent_path()) throw Error("output name '" + name + "' leaves out_dir");
    names_.push_back(name);
    return dir_ / rel;
  }

  std::ofstream stream(const std::string& name) {
    std::ofstream os(open(name), std::ios::binary);
    if (!os) throw Error("cannot write '" + (dir_ / name).string() + "'");
    return os;
  }

  std::vector<OutputDigest> digests() const {
    std::vector<OutputDigest> out;
    for (const auto& n : names_) out.push_back({n, sha256_file(dir_ / n)});
    return out;
  }

  const fs::path& dir() const { return dir_; }

 private:
  fs::path dir_;
  std::vector<std::string> names_;
};

json to_json(const NormReport<double>& r) {
  return {{"alpha", r.alpha},
          {"lambda", r.lambda},
          {"norm_alpha_infty", r.norm_alpha_infty},
          {"holder", r.norm_holder_1ma},
          {"alpha_lambda", r.norm_alpha_lambda},
          {"Lambda_alpha", r.lambda_alpha_of_driver},
          {"Delta_r", r.delta_r},
          {"norm_1ma", r.norm_1ma_infty_T},
          {"norm_alpha_1", r.norm_alpha_1}};
}

json to_json(const APrioriRecord& r) {
  return {{"Lambda_alpha", r.lambda_alpha_driver},   {"eta_norm", r.eta_norm},
          {"phi", r.phi},                           {"exponent", r.exponent},
          {"measured_norm", r.measured_norm},       {"structural_value", r.structural_value}};
}

int run_fbm(const Config& c, Outputs& out, std::ostream& log) {
  const TimeGrid grid = make_grid(c.real("T"), static_cast<std::size_t>(c.count("n")), c.real("r"));
  FbmConfig f;
  f.hurst = c.real("hurst");
  f.dim_m = static_cast<int>(c.count("m"));
  f.seed = c.seed("seed");
  f.method = parse_fbm_method(c.text("method"));
  const FbmSample s = generate_fbm(grid, f);
  if (s.fell_back_to_cholesky) log << "fbm: circulant embedding was not nonnegative, used exact Cholesky\n";
  write_path_csv(out.open("fbm.csv").string(), s.path);
  return kExitOk;
}

int run_norms(const Config& c, Outputs& out, std::ostream&) {
  const Path x = read_path_csv(c.text("input"));
  const Path g = c.empty("driver") ? x : read_path_csv(c.text("driver"));
  const double r = c.empty("r") ? x.grid().delay() : c.real("r");
  const auto rep = norm_report(x, g, c.real("alpha"), c.real("lambda"), c.real("delta"), r);
  auto os = out.stream("norms.csv");
  os << "alpha,lambda,norm_alpha_infty,holder,alpha_lambda,Lambda_alpha,Delta_r,norm_1ma,norm_alpha_1\n";
  os << num(rep.alpha) << ',' << num(rep.lambda) << ',' << num(rep.norm_alpha_infty) << ','
     << num(rep.norm_holder_1ma) << ',' << num(rep.norm_alpha_lambda) << ',' << num(rep.lambda_alpha_of_driver)
     << ',' << num(rep.delta_r) << ',' << num(rep.norm_1ma_infty_T) << ',' << num(rep.norm_alpha_1) << '\n';
  return kExitOk;
}

int run_integrate(const Config& c, Outputs& out, std::ostream& log) {
  const Path f = read_path_csv(c.text("f"));
  const Path g = read_path_csv(c.text("g"));
  const IntegralResult res = young_integral(f, g, c.real("alpha"));
  write_path_csv(out.open("integral.csv").string(), res.path);
  const BoundCertificate& cert = *res.bound_certificate;
  const json line = {{"record", "bound_certificate"}, {"Lambda_alpha", cert.lambda_alpha},
                     {"norm_alpha_1", cert.norm_alpha_1}, {"bound", cert.bound},
                     {"measured", cert.measured},         {"holds", cert.holds}};
  out.stream("certificate.jsonl") << line.dump() << '\n';
  log << line.dump() << '\n';
  return kExitOk;
}

int run_solve(const Config& c, Outputs& out, std::ostream& log) {
  const CoefficientSet coeffs = make_preset(c.text("preset"));
  SolverConfig cfg;
  cfg.grid = make_grid(c.real("T"), static_cast<std::size_t>(c.count("n")), c.real("r"));
  cfg.alpha = c.real("alpha");
  cfg.lambda = c.real("lambda");
  cfg.delta = c.real("delta");
  cfg.scheme = parse_scheme(c.text("scheme"));
  cfg.picard_tol = c.real("picard_tol");
  cfg.picard_max_iter = static_cast<int>(c.count("picard_max_iter"));

  Path g = [&] {
    if (!c.empty("driver")) return read_path_csv(c.text("driver"));
    FbmConfig f;
    f.hurst = c.real("hurst");
    f.dim_m = static_cast<int>(coeffs.m);
    f.seed = study_seed(c.seed("seed"), 0);
    f.method = parse_fbm_method(c.text("method"));
    return generate_fbm(cfg.grid, f).path;
  }();
  if (c.empty("driver")) write_path_csv(out.open("driver.csv").string(), g);

  const Segment eta = Segment::from_function(cfg.grid, coeffs.d, make_eta_preset(c.text("eta")));
  const SolutionBundle sol = solve(coeffs, eta, g, cfg);
  write_path_csv(out.open("solution.csv").string(), sol.path);

  const TheoremRegime reg = theorem_regime(coeffs, c.real("hurst"), cfg.alpha);
  auto os = out.stream("report.jsonl");
  os << json{{"record", "solver"},
             {"scheme", to_string(sol.scheme_used)},
             {"iterations", sol.iterations},
             {"converged", sol.converged},
             {"residual", sol.residual},
             {"weighted_residual", sol.weighted_residual},
             {"lambda", sol.lambda_used},
             {"alpha_zero", reg.alpha_zero},
             {"existence_regime", reg.existence},
             {"moment_regime", reg.moments}}
            .dump()
     << '\n';
  if (sol.norm_report) os << json{{"record", "norm_report"}, {"values", to_json(*sol.norm_report)}}.dump() << '\n';
  if (sol.a_priori) os << json{{"record", "a_priori"}, {"values", to_json(*sol.a_priori)}}.dump() << '\n';
  if (!sol.converged) log << "solve: Picard iteration stopped at the cap without reaching picard_tol\n";
  return kExitOk;
}

const char* kPlotScript = R"(import csv
import collections
import math

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

by_r = collections.defaultdict(list)
with open("converge_long.csv") as fh:
    for row in csv.DictReader(fh):
        by_r[float(row["r"])].append(float(row["dist_alpha"]))

summary = collections.defaultdict(list)
with open("converge_summary.csv") as fh:
    for row in csv.DictReader(fh):
        summary[float(row["p"])].append((float(row["r"]), float(row["mean"]), float(row["stderr"])))

fig, (left, right) = plt.subplots(1, 2, figsize=(10, 4))
rs = sorted(by_r)
med = [sorted(by_r[r])[len(by_r[r]) // 2] for r in rs]
left.loglog(rs, med, "o-", label="median distance")
left.set_xlabel("r")
left.set_ylabel("alpha-norm distance")
left.legend()
for p, rows in sorted(summary.items()):
    rows.sort()
    right.errorbar([r for r, _, _ in rows], [m for _, m, _ in rows], yerr=[s for _, _, s in rows],
                   fmt="o-", label="p = %g" % p)
right.set_xscale("log")
right.set_yscale("log")
right.set_xlabel("r")
right.set_ylabel("mean distance^p")
right.legend()
fig.tight_layout()
fig.savefig("converge.png", dpi=120)
)";

int run_converge(const Config& c, Outputs& out, std::ostream& log) {
  const CoefficientSet coeffs = make_preset(c.text("preset"));
  StudyConfig sc;
  sc.hurst = c.real("hurst");
  sc.alpha = c.real("alpha");
  sc.T = c.real("T");
  sc.n = static_cast<std::size_t>(c.count("n"));
  sc.delays = c.reals("delays");
  sc.p_list = c.reals("p_list");
  sc.n_seeds = static_cast<int>(c.count("n_seeds"));
  sc.master_seed = c.seed("seed");
  sc.method = parse_fbm_method(c.text("method"));
  sc.parallelism = static_cast<int>(c.count("parallelism"));
  const ConvergenceReport rep = lp_convergence_study(coeffs, make_eta_preset(c.text("eta")), sc);

  {
    auto os = out.stream("converge_long.csv");
    os << "seed,r,dist_alpha,dist_sup,Lambda_alpha\n";
    for (Eigen::Index s = 0; s < rep.dist_alpha.rows(); ++s) {
      for (Eigen::Index k = 0; k < rep.dist_alpha.cols(); ++k) {
        os << rep.seeds[static_cast<std::size_t>(s)] << ',' << num(rep.delays[static_cast<std::size_t>(k)]) << ','
           << num(rep.dist_alpha(s, k)) << ',' << num(rep.dist_sup(s, k)) << ','
           << num(rep.lambda_alpha_samples[static_cast<std::size_t>(s)]) << '\n';
      }
    }
  }
  {
    auto os = out.stream("converge_summary.csv");
    os << "r,p,mean,stderr\n";
    for (std::size_t k = 0; k < rep.delays.size(); ++k) {
      for (std::size_t p = 0; p < rep.p_list.size(); ++p) {
        const auto pi = static_cast<Eigen::Index>(p);
        const auto ki = static_cast<Eigen::Index>(k);
        os << num(rep.delays[k]) << ',' << num(rep.p_list[p]) << ',' << num(rep.lp_means(pi, ki)) << ','
           << num(rep.lp_stderr(pi, ki)) << '\n';
      }
    }
  }
  out.stream("plot_converge.py") << kPlotScript;

  const GateResult gate = evaluate_gates(rep, sc.alpha);
  log << "converge: endpoint exceptions " << gate.endpoint_exception_fraction << " (allowed "
      << kEndpointExceptionAllowance << ") " << (gate.endpoint_ok ? "ok" : "FAIL") << '\n';
  log << "converge: median alpha-norm slope " << gate.median_slope << " (need >= " << gate.slope_threshold << ") "
      << (gate.slope_ok ? "ok" : "FAIL") << '\n';
  try {
    log << "converge: median sup-norm slope " << rate_fit(rep, DistanceMetric::sup_norm).median << '\n';
  } catch (const Error&) {
  }
  for (std::size_t p = 0; p < gate.lp_ratio.size(); ++p) {
    log << "converge: L^" << rep.p_list[p] << " mean ratio r_max/r_min " << gate.lp_ratio[p] << " (need >= "
        << kLpDecreaseFactor << ")\n";
  }
  log << "converge: gates " << (gate.passed() ? "passed" : "FAILED") << '\n';
  return gate.passed() ? kExitOk : kExitGateFailure;
}

std::uint64_t master_seed_of(const Config& c) {
  const auto& v = c.values();
  return v.count("seed") ? c.seed("seed") : 0;
}

}  // namespace

RunManifest run_config(const Config& config, std::ostream& log) {
  const auto start = std::chrono::steady_clock::now();
  Outputs out(config);
  const std::string& sub = config.subcommand();
  int code = kExitOk;
  if (sub == "fbm") code = run_fbm(config, out, log);
  else if (sub == "norms") code = run_norms(config, out, log);
  else if (sub == "integrate") code = run_integrate(config, out, log);
  else if (sub == "solve") code = run_solve(config, out, log);
  else if (sub == "converge") code = run_converge(config, out, log);
  else throw ConfigError("unknown subcommand '" + sub + "'");

  RunManifest m;
  m.subcommand = sub;
  m.config = config.values();
  m.master_seed = master_seed_of(config);
  m.exit_code = code;
  m.outputs = out.digests();
  m.duration_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::ofstream os(out.dir() / kManifestName, std::ios::binary);
  if (!os) throw Error("cannot write the manifest");
  os << manifest_to_line(m) << '\n';
  return m;
}

int replay(const std::string& manifest_file, const std::optional<std::string>& out_dir, std::ostream& log) {
  const RunManifest recorded = read_manifest(manifest_file);
  ConfigSources src;
  src.flags = recorded.config;
  if (out_dir) src.flags["out_dir"] = *out_dir;
  src.getenv = [](const char*) -> const char* { return nullptr; };
  const Config cfg = resolve_config(recorded.subcommand, src);
  const RunManifest fresh = run_config(cfg, log);

  int mismatches = 0;
  for (const auto& want : recorded.outputs) {
    const auto it = std::find_if(fresh.outputs.begin(), fresh.outputs.end(),
                                 [&](const OutputDigest& d) { return d.file == want.file; });
    if (it == fresh.outputs.end()) {
      log << "replay: " << want.file << " was not produced\n";
      ++mismatches;
    } else if (it->sha256 != want.sha256) {
      log << "replay: " << want.file << " differs\n";
      ++mismatches;
    }
  }
  if (fresh.outputs.size() != recorded.outputs.size()) ++mismatches;
  log << "replay: " << recorded.outputs.size() << " outputs, " << mismatches << " mismatches\n";
  return mismatches == 0 ? kExitOk : kExitError;
}

int run(int argc, char** argv) {
  CLI::App app{"Pathwise delay equations driven by fractional Brownian motion"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  struct Slot {
    CLI::App* app;
    std::string config_file;
    std::map<std::string, std::string> flags;
    std::map<std::string, CLI::Option*> options;
  };
  std::map<std::string, Slot> slots;
  static const std::map<std::string, std::string> blurbs = {
      {"fbm", "sample fractional Brownian motion paths"},
      {"norms", "fractional norms of a path CSV"},
      {"integrate", "Young integral of f against g"},
      {"solve", "solve the delay equation for one driver"},
      {"converge", "Monte Carlo delay-to-zero convergence study"}};
  for (const auto& name : subcommand_names()) {
    Slot& slot = slots[name];
    slot.app = app.add_subcommand(name, blurbs.at(name));
    slot.app->add_option("--config", slot.config_file, "flat key=value config file");
    for (const auto& spec : schema(name)) {
      std::string names = "--" + spec.key;
      if (spec.key.find('_') != std::string::npos) {
        std::string dashed = spec.key;
        std::replace(dashed.begin(), dashed.end(), '_', '-');
        names += ",--" + dashed;
      }
      std::string help = spec.help;
      if (!spec.default_value.empty()) help += " [" + spec.default_value + "]";
      slot.options[spec.key] = slot.app->add_option(names, slot.flags[spec.key], help);
    }
  }
  std::string manifest_file;
  std::string replay_out;
  CLI::App* replay_app = app.add_subcommand("replay", "re-run a manifest and compare output digests");
  replay_app->add_option("manifest", manifest_file, "manifest.jsonl of an earlier run")->required();
  replay_app->add_option("--out-dir,--out_dir", replay_out, "directory for the re-run (default: the recorded one)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (replay_app->parsed()) {
      return replay(manifest_file, replay_out.empty() ? std::nullopt : std::optional<std::string>(replay_out),
                    std::cerr);
    }
    for (auto& [name, slot] : slots) {
      if (!slot.app->parsed()) continue;
      ConfigSources src;
      if (!slot.config_file.empty()) src.file = slot.config_file;
      for (const auto& [key, opt] : slot.options) {
        if (opt->count() > 0) src.flags[key] = slot.flags[key];
      }
      const Config cfg = resolve_config(name, src);
      const RunManifest m = run_config(cfg, std::cerr);
      for (const auto& o : m.outputs) std::cout << (fs::path(cfg.text("out_dir")) / o.file).string() << '\n';
      return m.exit_code;
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitUsage;
}

}  // namespace ydde::cli
