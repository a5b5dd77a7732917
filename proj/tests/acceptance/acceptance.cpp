// Acceptance suite: one PASS/FAIL line per criterion.
//
//   ydde_acceptance [--tool PATH] [--only N[,N...]] [--parallelism P]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <numeric>
#include <sys/wait.h>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "ydde/cli.hpp"
#include "ydde/coefficients.hpp"
#include "ydde/convergence.hpp"
#include "ydde/csv.hpp"
#include "ydde/fbm.hpp"
#include "ydde/frac_norms.hpp"
#include "ydde/random.hpp"
#include "ydde/solver.hpp"
#include "ydde/young.hpp"

using namespace ydde;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool passed;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

int g_parallelism = 1;
std::string g_tool;

Path subsample(const Path& fine, std::size_t factor) {
  const TimeGrid& g = fine.grid();
  const TimeGrid coarse = make_history_grid(g.horizon(), g.n_main() / factor, g.n_history() / factor);
  Eigen::MatrixXd v(fine.dim(), static_cast<Eigen::Index>(coarse.size()));
  for (std::size_t k = 0; k < coarse.size(); ++k) v.col(static_cast<Eigen::Index>(k)) = fine.at(k * factor);
  return Path(coarse, std::move(v));
}

double rel(double got, double want) { return std::abs(got - want) / std::abs(want); }

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// 1. Sample covariance of exact-Cholesky fBm on a 5 x 5 lattice against the closed form.
Outcome fbm_exactness() {
  const std::size_t n = 256;
  const int paths = 100000;
  const std::vector<std::size_t> lattice{32, 64, 128, 192, 256};
  const TimeGrid grid = make_grid(1.0, n, 0.0);
  int entries = 0, misses = 0;
  double worst = 0;
  for (double H : {0.6, 0.75, 0.9}) {
    const FbmGenerator gen(grid, H, FbmMethod::exact_cholesky);
    const std::size_t L = lattice.size();
    std::vector<double> sum(L * L, 0.0), sum2(L * L, 0.0);
    for (int p = 0; p < paths; ++p) {
      const Path w = gen.sample(derive_seed(1, "acceptance-fbm", static_cast<std::size_t>(p)), 1).path;
      for (std::size_t a = 0; a < L; ++a) {
        for (std::size_t b = a; b < L; ++b) {
          const double v = w.at(0, lattice[a]) * w.at(0, lattice[b]);
          sum[a * L + b] += v;
          sum2[a * L + b] += v * v;
        }
      }
    }
    for (std::size_t a = 0; a < L; ++a) {
      for (std::size_t b = a; b < L; ++b) {
        const double mean = sum[a * L + b] / paths;
        const double var = (sum2[a * L + b] - paths * mean * mean) / (paths - 1);
        const double se = std::sqrt(var / paths);
        const double want = fbm_covariance(grid.time(lattice[a]), grid.time(lattice[b]), H);
        const double z = std::abs(mean - want) / se;
        worst = std::max(worst, z);
        ++entries;
        if (z > 3.0) ++misses;
      }
    }
  }
  return {misses == 0, std::to_string(entries) + " lattice entries over H in {0.6,0.75,0.9}, " +
                           std::to_string(misses) + " beyond 3 SE, worst " + fmt("%.2f", worst) + " SE"};
}

// 2. Norm oracles on f(t) = t at n = 4096, with the observed order under doubling.
Outcome norm_oracles() {
  const double a = 0.3;
  struct Case {
    const char* name;
    double closed;
    std::function<double(const Path&)> eval;
  };
  const std::vector<Case> cases{
      {"norm_alpha_infty", 1.0 + 1.0 / (1.0 - a), [&](const Path& f) { return norm_alpha_infty(f, a); }},
      {"norm_1ma_infty_T", 1.0 + 1.0 / a, [&](const Path& f) { return norm_1ma_infty_T(f, a); }},
      {"norm_alpha_1", 1.0 / (2.0 - a) + 1.0 / ((1.0 - a) * (2.0 - a)), [&](const Path& f) { return norm_alpha_1(f, a); }},
      {"delta_r", 1.0 / (1.0 - a), [&](const Path& f) { return delta_r(f, a, 1.0); }}};
  bool ok = true;
  std::ostringstream d;
  for (const auto& c : cases) {
    const auto path = [](std::size_t n) { return Path::from_function(make_grid(1.0, n, 0.0), 1, [](double t) { return t; }); };
    const double e_half = rel(c.eval(path(2048)), c.closed);
    const double e = rel(c.eval(path(4096)), c.closed);
    // Errors at rounding level carry no order information; the quadrature is exact there.
    const bool exact = e < 1e-12 && e_half < 1e-12;
    const double order = exact ? INFINITY : std::log2(e_half / e);
    const bool good = e < 1e-2 && (exact || order >= 1.0);
    ok = ok && good;
    d << c.name << " err " << fmt("%.1e", e) << (exact ? " (exact)" : " order " + fmt("%.2f", order)) << "; ";
  }
  return {ok, d.str()};
}

// 3. Lambda_alpha of the identity and the norm_1ma bound on fBm paths.
Outcome lambda_closed_form() {
  const double a = 0.3;
  const Path id = Path::from_function(make_grid(1.0, 4096, 0.0), 1, [](double t) { return t; });
  const double closed = 1.0 / (std::tgamma(0.7) * std::tgamma(1.3));
  const double e = rel(lambda_alpha(id, a), closed);
  const FbmGenerator gen(make_grid(1.0, 4096, 0.0), 0.75, FbmMethod::circulant_embedding);
  std::vector<int> violation(100, 0);
  parallel_for(100, g_parallelism, [&](std::size_t i) {
    const Path w = gen.sample(study_seed(20080101, i), 1).path;
    const double bound = norm_1ma_infty_T(w, a) / (std::tgamma(1.0 - a) * std::tgamma(a));
    violation[i] = within_bound(lambda_alpha(w, a), bound) ? 0 : 1;
  });
  const int v = std::accumulate(violation.begin(), violation.end(), 0);
  return {e < 1e-2 && v == 0,
          "identity rel err " + fmt("%.1e", e) + ", bound violations " + std::to_string(v) + "/100"};
}

// 4. int_0^1 g dg against g(1)^2 / 2 on fBm paths.
Outcome young_chain_rule() {
  const std::size_t n = 4096;
  const FbmGenerator gen(make_grid(1.0, n, 0.0), 0.75, FbmMethod::circulant_embedding);
  const std::vector<std::size_t> factors{8, 4, 2, 1};
  std::vector<std::vector<double>> errs(factors.size(), std::vector<double>(100));
  parallel_for(100, g_parallelism, [&](std::size_t i) {
    const Path fine = gen.sample(study_seed(7, i), 1).path;
    for (std::size_t f = 0; f < factors.size(); ++f) {
      const Path g = factors[f] == 1 ? fine : subsample(fine, factors[f]);
      const double I = young_integral(g, g).path.at(0, g.size() - 1);
      const double gT = g.at(0, g.size() - 1);
      errs[f][i] = rel(I, 0.5 * gT * gT);
    }
  });
  std::vector<double> x, y;
  for (std::size_t f = 0; f < factors.size(); ++f) {
    x.push_back(static_cast<double>(n / factors[f]));
    y.push_back(median(errs[f]));
  }
  const double order = -fit_log_log(x, y).slope;
  const double med = y.back();
  return {med < 1e-2 && order >= 0.4, "median rel err " + fmt("%.2e", med) + " at n=4096 (need < 1e-2), order " +
                                          fmt("%.3f", order) + " (need >= 0.4)"};
}

// 5. Integral and sigma increment inequalities over every preset and 100 drivers.
Outcome bound_inequalities() {
  const std::size_t n = 1024;
  const double a = 0.3;
  const double r = 1.0 / 16;
  std::size_t nr_viol = 0, sigma_viol = 0, checks = 0;
  for (const auto& name : preset_names()) {
    const CoefficientSet c = make_preset(name);
    SolverConfig base;
    base.grid = make_grid(1.0, n, 0.0);
    base.compute_reports = false;
    SolverConfig delayed = base;
    delayed.grid = make_grid(1.0, n, r);
    const FbmGenerator gen(delayed.grid, 0.75, FbmMethod::circulant_embedding);
    const EtaFn eta = make_eta_preset("cosine");
    const ScalarSigmaFn sigma = [&c](double t, double x) { return c.sigma(t, Eigen::VectorXd::Constant(1, x))(0, 0); };
    SigmaBoundConstants k;
    k.alpha = a;
    k.beta = c.constants.beta;
    k.delta = c.constants.delta;
    k.M0 = c.constants.M0;
    std::vector<std::size_t> nr(100), sg(100);
    parallel_for(100, g_parallelism, [&](std::size_t i) {
      const Path g = gen.sample(study_seed(11, i), 1).path;
      const Path x = solve_euler(c, Segment::from_function(base.grid, 1, eta), g.main_segment(), base).path;
      const Path xr = solve_euler(c, Segment::from_function(delayed.grid, 1, eta), g, delayed).path.main_segment();
      // Integrand sigma(X) against the driver.
      Eigen::MatrixXd s(1, static_cast<Eigen::Index>(x.size()));
      for (std::size_t j = 0; j < x.size(); ++j) s(0, static_cast<Eigen::Index>(j)) = sigma(x.time(j), x.at(0, j));
      const NrBoundReport rep = check_nr_bounds(Path(x.grid(), s), g.main_segment(), a);
      nr[i] = rep.pointwise_violations + rep.increment_violations;
      SigmaBoundConstants kk = k;
      kk.MN = c.constants.MN(std::max(x.sup_norm(), xr.sup_norm()));
      sg[i] = check_sigma_increment_bound(sigma, x, xr, kk).violations;
    });
    for (std::size_t i = 0; i < 100; ++i) {
      nr_viol += nr[i];
      sigma_viol += sg[i];
    }
    checks += 100;
  }
  return {nr_viol == 0 && sigma_viol == 0, std::to_string(checks) + " preset x seed runs, integral-bound violations " +
                                               std::to_string(nr_viol) + ", sigma-bound violations " +
                                               std::to_string(sigma_viol)};
}

// 6. Solver oracles.
Outcome solver_oracles() {
  std::ostringstream d;
  bool ok = true;
  const double r = 1.0 / 16;

  {  // additive preset against eta(0) + g - g(0)
    SolverConfig cfg;
    cfg.grid = make_grid(1.0, 4096, r);
    cfg.compute_reports = false;
    const Path g = generate_fbm(cfg.grid, FbmConfig{0.75, 1, 5, FbmMethod::circulant_embedding}).path;
    const Segment eta = Segment::from_function(cfg.grid, 1, make_eta_preset("cosine"));
    const Path x = solve_euler(make_preset("additive"), eta, g, cfg).path;
    double err = 0;
    for (std::size_t k = cfg.grid.origin(); k < x.size(); ++k) err = std::max(err, std::abs(x.at(0, k) - 1.0 - g.at(0, k)));
    ok = ok && err < 1e-12;
    d << "additive " << fmt("%.1e", err) << "; ";
  }
  {  // delay beyond the horizon, sigma = x, b = 0, eta = 1
    CoefficientSet c = make_preset("linear");
    c.drift = Drift();
    double err = 0;
    for (double rr : {1.0, 1.25}) {
      SolverConfig cfg;
      cfg.grid = make_grid(1.0, 4096, rr);
      cfg.compute_reports = false;
      const Path g = generate_fbm(cfg.grid, FbmConfig{0.75, 1, 6, FbmMethod::circulant_embedding}).path;
      const Path x = solve_euler(c, Segment::from_function(cfg.grid, 1, make_eta_preset("constant")), g, cfg).path;
      for (std::size_t k = cfg.grid.origin(); k < x.size(); ++k) err = std::max(err, std::abs(x.at(0, k) - 1.0 - g.at(0, k)));
    }
    ok = ok && err < 1e-12;
    d << "r>=T reduction " << fmt("%.1e", err) << "; ";
  }
  {  // Picard at n = 1024 against Euler on an 8x finer grid with the same driver
    const CoefficientSet c = make_preset("sine");
    const TimeGrid fine_grid = make_grid(1.0, 8192, r);
    const FbmGenerator gen(fine_grid, 0.75, FbmMethod::circulant_embedding);
    std::vector<double> gaps(20);
    parallel_for(gaps.size(), g_parallelism, [&](std::size_t i) {
      const Path g_fine = gen.sample(study_seed(13, i), 1).path;
      SolverConfig fine;
      fine.grid = fine_grid;
      fine.compute_reports = false;
      const Path xf = solve_euler(c, Segment::from_function(fine.grid, 1, make_eta_preset("cosine")), g_fine, fine).path;
      SolverConfig coarse = fine;
      coarse.grid = make_grid(1.0, 1024, r);
      coarse.scheme = Scheme::picard;
      coarse.picard_max_iter = 200;
      const Path g = subsample(g_fine, 8);
      const Path xp = solve_picard(c, Segment::from_function(coarse.grid, 1, make_eta_preset("cosine")), g, coarse).path;
      gaps[i] = (xp - subsample(xf, 8)).sup_norm();
    });
    const double worst = *std::max_element(gaps.begin(), gaps.end());
    ok = ok && worst < 5e-3;
    d << "Picard vs fine Euler worst " << fmt("%.2e", worst) << " (median " << fmt("%.2e", median(gaps))
      << ", 20 drivers, need < 5e-3); ";
  }
  {  // two starting iterates
    const CoefficientSet c = make_preset("sine");
    SolverConfig cfg;
    cfg.grid = make_grid(1.0, 1024, r);
    cfg.scheme = Scheme::picard;
    cfg.picard_max_iter = 200;
    cfg.compute_reports = false;
    const Path g = generate_fbm(cfg.grid, FbmConfig{0.75, 1, 21, FbmMethod::circulant_embedding}).path;
    const Segment eta = Segment::from_function(cfg.grid, 1, make_eta_preset("constant"));
    const SolutionBundle a = solve_picard(c, eta, g, cfg);
    const Path start = Path::from_function(cfg.grid, 1, [](double t) { return 3.0 * std::cos(5 * t); });
    const SolutionBundle b = solve_picard(c, eta, g, cfg, start);
    const double gap = (a.path - b.path).sup_norm();
    const bool good = a.converged && b.converged && gap <= 2 * cfg.picard_tol;
    ok = ok && good;
    d << "two starts gap " << fmt("%.1e", gap) << " (" << a.iterations << "/" << b.iterations << " sweeps)";
  }
  return {ok, d.str()};
}

// 7. Default delay-to-zero study on the sine and linear presets.
Outcome delay_convergence() {
  StudyConfig cfg;
  cfg.parallelism = g_parallelism;
  bool ok = true;
  std::ostringstream d;
  for (const char* name : {"sine", "linear"}) {
    const ConvergenceReport rep = lp_convergence_study(make_preset(name), make_eta_preset("constant"), cfg);
    const GateResult gate = evaluate_gates(rep, cfg.alpha);
    ok = ok && gate.passed();
    d << name << ": endpoint exceptions " << fmt("%.2f", gate.endpoint_exception_fraction) << ", median slope "
      << fmt("%.3f", gate.median_slope) << ", L^p ratios";
    for (double x : gate.lp_ratio) d << ' ' << fmt("%.1f", x);
    d << (gate.passed() ? " ok; " : " FAIL; ");
  }
  return {ok, d.str()};
}

// 8. Lambda_alpha(W) moments and their batch stability.
Outcome fernique() {
  StudyConfig cfg;
  cfg.n_seeds = 200;
  cfg.parallelism = g_parallelism;
  const FerniqueStatistics st = fernique_statistics(cfg);
  bool ok = st.all_finite;
  std::ostringstream d;
  auto stable = [&](const char* label, const std::function<double(double)>& fn) {
    const BatchStat a = batch_statistic(st.samples, 0, 100, fn);
    const BatchStat b = batch_statistic(st.samples, 100, 100, fn);
    const double z = std::abs(a.mean - b.mean) / std::hypot(a.stderr_, b.stderr_);
    const bool good = std::isfinite(a.mean) && std::isfinite(b.mean) && z <= 5.0;
    ok = ok && good;
    d << label << " z=" << fmt("%.2f", z) << "; ";
  };
  stable("E L", [](double v) { return v; });
  stable("E L^2", [](double v) { return v * v; });
  stable("E L^4", [](double v) { return std::pow(v, 4); });
  stable("E exp(L^0.5)", [](double v) { return std::exp(std::sqrt(v)); });
  d << "q99 " << fmt("%.3f", st.quantiles.back());
  return {ok, d.str()};
}

// 9. Every subcommand re-run from its manifest yields byte-identical outputs.
Outcome determinism() {
  const fs::path root = fs::absolute("acceptance_runs");
  fs::remove_all(root);
  fs::create_directories(root);
  auto run = [&](const std::string& args) {
    const std::string cmd = "\"" + g_tool + "\" " + args + " > /dev/null 2>> \"" + (root / "log.txt").string() + "\"";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  };
  const std::string o = (root / "").string();
  struct Step {
    std::string name;
    std::string args;
  };
  const std::vector<Step> steps{
      {"fbm", "fbm --n 512 --r 0.125 --m 2 --seed 3 --out-dir " + o + "fbm"},
      {"norms", "norms --input " + o + "fbm/fbm.csv --r 0.125 --out-dir " + o + "norms"},
      {"integrate", "integrate --f " + o + "fbm/fbm.csv --g " + o + "fbm/fbm.csv --out-dir " + o + "integrate"},
      {"solve", "solve --n 512 --r 0.125 --scheme picard --out-dir " + o + "solve"},
      {"converge", "converge --n 256 --n-seeds 30 --parallelism " + std::to_string(g_parallelism) + " --out-dir " + o +
                       "converge"}};
  bool ok = true;
  std::ostringstream d;
  for (const auto& s : steps) {
    const int first = run(s.args);
    const bool ran = first == 0 || (s.name == "converge" && first == 3);
    const int again = ran ? run("replay " + o + s.name + "/manifest.jsonl --out-dir " + o + s.name + "_replay") : -1;
    const bool good = ran && again == 0;
    ok = ok && good;
    d << s.name << (good ? " identical" : " MISMATCH(" + std::to_string(first) + "," + std::to_string(again) + ")")
      << "; ";
  }
  return {ok, d.str()};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance suite"};
  std::vector<int> only;
  g_parallelism = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  app.add_option("--tool", g_tool, "path of the ydde binary")->required();
  app.add_option("--only", only, "criteria to run")->delimiter(',');
  app.add_option("--parallelism", g_parallelism, "worker threads");
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"fBm exactness", fbm_exactness},         {"norm oracles", norm_oracles},
      {"Lambda_alpha closed form", lambda_closed_form}, {"Young chain rule", young_chain_rule},
      {"bound inequalities", bound_inequalities}, {"solver oracles", solver_oracles},
      {"delay convergence", delay_convergence},   {"Fernique statistics", fernique},
      {"determinism", determinism}};

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i + 1);
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.passed) ++failed;
    std::printf("%s [%d] %s: %s (%.1fs)\n", o.passed ? "PASS" : "FAIL", id, criteria[i].first, o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}
