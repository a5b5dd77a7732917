#include "ydde/convergence.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <thread>

#include "ydde/errors.hpp"
#include "ydde/frac_norms.hpp"
#include "ydde/random.hpp"

namespace ydde {

void parallel_for(std::size_t count, int parallelism, const std::function<void(std::size_t)>& fn) {
  const auto workers = static_cast<std::size_t>(std::max(1, parallelism));
  if (workers == 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < std::min(workers, count); ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < count; i = next++) {
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next = count;
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

std::vector<double> default_delays(double T) {
  std::vector<double> out;
  for (int k = 2; k <= 8; ++k) out.push_back(T * std::ldexp(1.0, -k));
  return out;
}

std::uint64_t study_seed(std::uint64_t master_seed, std::size_t index) {
  return derive_seed(master_seed, "driver", index);
}

namespace {

struct SeedRow {
  std::vector<double> alpha;
  std::vector<double> sup;
};

SeedRow distances_for_driver(const CoefficientSet& coeffs, const EtaFn& eta, const Path& g, double alpha,
                             const std::vector<double>& delays) {
  if (!coeffs.drift.is_pointwise()) {
    throw ConfigError("delay convergence needs a pointwise drift b(t, x(t)); '" + coeffs.name +
                      "' is hereditary");
  }
  const TimeGrid base = g.grid().with_history(0);
  SolverConfig cfg;
  cfg.alpha = alpha;
  cfg.compute_reports = false;
  cfg.grid = base;
  const Path driver = g.main_segment();
  const Path reference =
      solve_euler(coeffs, Segment::from_function(base, coeffs.d, eta), driver, cfg).path;

  SeedRow row;
  for (double r : delays) {
    cfg.grid = base.with_history(base.steps_for(r));
    const Path delayed =
        solve_euler(coeffs, Segment::from_function(cfg.grid, coeffs.d, eta), driver, cfg).path.main_segment();
    const Path diff = reference - delayed;
    row.alpha.push_back(norm_alpha_infty(diff, alpha));
    row.sup.push_back(diff.sup_norm());
  }
  return row;
}

void fill_lp(ConvergenceReport& rep) {
  const auto n_seeds = rep.dist_alpha.rows();
  const auto n_delays = rep.dist_alpha.cols();
  rep.lp_means.resize(static_cast<Eigen::Index>(rep.p_list.size()), n_delays);
  rep.lp_stderr.resize(rep.lp_means.rows(), n_delays);
  for (std::size_t pi = 0; pi < rep.p_list.size(); ++pi) {
    const double p = rep.p_list[pi];
    for (Eigen::Index c = 0; c < n_delays; ++c) {
      const Eigen::ArrayXd v = rep.dist_alpha.col(c).array().pow(p);
      const double mean = v.mean();
      const double var = n_seeds > 1 ? (v - mean).square().sum() / static_cast<double>(n_seeds - 1) : 0.0;
      rep.lp_means(static_cast<Eigen::Index>(pi), c) = mean;
      rep.lp_stderr(static_cast<Eigen::Index>(pi), c) = std::sqrt(var / static_cast<double>(n_seeds));
    }
  }
  rep.dominating.resize(static_cast<std::size_t>(n_seeds));
  for (Eigen::Index s = 0; s < n_seeds; ++s) rep.dominating[static_cast<std::size_t>(s)] = rep.dist_alpha.row(s).maxCoeff();
}

}  // namespace

ConvergenceReport pathwise_convergence_study(const CoefficientSet& coeffs, const EtaFn& eta, const Path& g,
                                             double alpha, const std::vector<double>& delays) {
  const SeedRow row = distances_for_driver(coeffs, eta, g, alpha, delays);
  ConvergenceReport rep;
  rep.delays = delays;
  rep.seeds = {0};
  const auto nd = static_cast<Eigen::Index>(delays.size());
  rep.dist_alpha = Eigen::Map<const Eigen::RowVectorXd>(row.alpha.data(), nd);
  rep.dist_sup = Eigen::Map<const Eigen::RowVectorXd>(row.sup.data(), nd);
  rep.lambda_alpha_samples = {lambda_alpha(g, alpha)};
  fill_lp(rep);
  return rep;
}

ConvergenceReport lp_convergence_study(const CoefficientSet& coeffs, const EtaFn& eta, const StudyConfig& cfg) {
  if (cfg.n_seeds < 1) throw ConfigError("n_seeds must be positive");
  ConvergenceReport rep;
  rep.delays = cfg.delays.empty() ? default_delays(cfg.T) : cfg.delays;
  rep.p_list = cfg.p_list;
  const auto n_seeds = static_cast<std::size_t>(cfg.n_seeds);
  const auto nd = static_cast<Eigen::Index>(rep.delays.size());
  rep.seeds.resize(n_seeds);
  rep.dist_alpha.resize(static_cast<Eigen::Index>(n_seeds), nd);
  rep.dist_sup.resize(static_cast<Eigen::Index>(n_seeds), nd);
  rep.lambda_alpha_samples.resize(n_seeds);

  const TimeGrid grid = make_grid(cfg.T, cfg.n, 0.0);
  for (double r : rep.delays) (void)grid.steps_for(r);
  const FbmGenerator gen(grid, cfg.hurst, cfg.method);

  parallel_for(n_seeds, cfg.parallelism, [&](std::size_t i) {
    const std::uint64_t seed = study_seed(cfg.master_seed, i);
    const Path g = gen.sample(seed, static_cast<int>(coeffs.m)).path;
    const SeedRow row = distances_for_driver(coeffs, eta, g, cfg.alpha, rep.delays);
    const auto ii = static_cast<Eigen::Index>(i);
    for (Eigen::Index c = 0; c < nd; ++c) {
      rep.dist_alpha(ii, c) = row.alpha[static_cast<std::size_t>(c)];
      rep.dist_sup(ii, c) = row.sup[static_cast<std::size_t>(c)];
    }
    rep.seeds[i] = seed;
    rep.lambda_alpha_samples[i] = lambda_alpha(g, cfg.alpha);
  });
  fill_lp(rep);
  return rep;
}

LogLogFit fit_log_log(const std::vector<double>& delays, const std::vector<double>& distances) {
  if (delays.size() != distances.size()) throw Error("delays and distances differ in length");
  std::vector<double> x, y;
  for (std::size_t i = 0; i < delays.size(); ++i) {
    if (delays[i] > 0.0 && distances[i] > 0.0) {
      x.push_back(std::log(delays[i]));
      y.push_back(std::log(distances[i]));
    }
  }
  if (x.size() < 4) throw Error("rate fit needs at least four delays with positive distance");
  const double n = static_cast<double>(x.size());
  const double xm = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double ym = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - xm) * (y[i] - ym);
    sxx += (x[i] - xm) * (x[i] - xm);
  }
  LogLogFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = ym - fit.slope * xm;
  fit.points = x.size();
  return fit;
}

namespace {

double median(std::vector<double> v) {
  if (v.empty()) throw Error("median of an empty sample");
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double upper = v[mid];
  if (v.size() % 2) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

}  // namespace

SlopeSummary rate_fit(const ConvergenceReport& report, DistanceMetric metric) {
  const Eigen::MatrixXd& d = metric == DistanceMetric::alpha_norm ? report.dist_alpha : report.dist_sup;
  SlopeSummary out;
  for (Eigen::Index s = 0; s < d.rows(); ++s) {
    std::vector<double> row(d.row(s).data(), d.row(s).data() + 0);
    row.resize(static_cast<std::size_t>(d.cols()));
    for (Eigen::Index c = 0; c < d.cols(); ++c) row[static_cast<std::size_t>(c)] = d(s, c);
    out.per_seed.push_back(fit_log_log(report.delays, row).slope);
  }
  out.median = median(out.per_seed);
  return out;
}

GateResult evaluate_gates(const ConvergenceReport& report, double alpha) {
  GateResult gate;
  const auto& r = report.delays;
  const auto largest = static_cast<Eigen::Index>(std::max_element(r.begin(), r.end()) - r.begin());
  const auto smallest = static_cast<Eigen::Index>(std::min_element(r.begin(), r.end()) - r.begin());

  std::size_t exceptions = 0;
  for (Eigen::Index s = 0; s < report.dist_alpha.rows(); ++s) {
    if (report.dist_alpha(s, smallest) >= report.dist_alpha(s, largest)) ++exceptions;
  }
  gate.endpoint_exception_fraction =
      static_cast<double>(exceptions) / static_cast<double>(std::max<Eigen::Index>(1, report.dist_alpha.rows()));
  gate.endpoint_ok = gate.endpoint_exception_fraction <= kEndpointExceptionAllowance;

  gate.slope_threshold = 1.0 - 2.0 * alpha - kSlopeTolerance;
  try {
    gate.median_slope = rate_fit(report, DistanceMetric::alpha_norm).median;
    gate.slope_ok = gate.median_slope >= gate.slope_threshold;
  } catch (const Error&) {
    gate.slope_ok = false;
  }

  gate.lp_ok = !report.p_list.empty();
  for (Eigen::Index p = 0; p < report.lp_means.rows(); ++p) {
    const double lo = report.lp_means(p, smallest);
    const double ratio = lo > 0.0 ? report.lp_means(p, largest) / lo : std::numeric_limits<double>::infinity();
    gate.lp_ratio.push_back(ratio);
    if (!(ratio >= kLpDecreaseFactor)) gate.lp_ok = false;
  }
  return gate;
}

BatchStat batch_statistic(const std::vector<double>& samples, std::size_t first, std::size_t count,
                          const std::function<double(double)>& transform) {
  if (count < 2 || first + count > samples.size()) throw Error("batch statistic needs at least two samples");
  std::vector<double> v(count);
  for (std::size_t i = 0; i < count; ++i) v[i] = transform(samples[first + i]);
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(count);
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return BatchStat{mean, std::sqrt(ss / static_cast<double>(count - 1) / static_cast<double>(count))};
}

FerniqueStatistics fernique_statistics(const StudyConfig& cfg) {
  if (!(cfg.alpha > 1.0 - cfg.hurst && cfg.alpha < 0.5)) {
    throw ConfigError("Fernique statistics need alpha in (1 - H, 1/2)");
  }
  const auto n_seeds = static_cast<std::size_t>(cfg.n_seeds);
  const TimeGrid grid = make_grid(cfg.T, cfg.n, 0.0);
  const FbmGenerator gen(grid, cfg.hurst, cfg.method);
  FerniqueStatistics st;
  st.samples.resize(n_seeds);
  parallel_for(n_seeds, cfg.parallelism, [&](std::size_t i) {
    const Path w = gen.sample(derive_seed(cfg.master_seed, "fernique", i), 1).path;
    st.samples[i] = lambda_alpha(w, cfg.alpha);
  });
  st.all_finite = std::all_of(st.samples.begin(), st.samples.end(), [](double v) { return std::isfinite(v); });
  const std::size_t n = st.samples.size();
  for (double p : st.moment_orders) {
    st.moments.push_back(batch_statistic(st.samples, 0, n, [p](double v) { return std::pow(v, p); }).mean);
  }
  for (double d : st.exp_powers) {
    st.exp_means.push_back(batch_statistic(st.samples, 0, n, [d](double v) { return std::exp(std::pow(v, d)); }).mean);
  }
  std::vector<double> sorted = st.samples;
  std::sort(sorted.begin(), sorted.end());
  for (double q : st.quantile_levels) {
    const auto idx = static_cast<std::size_t>(std::ceil(q * static_cast<double>(n))) - 1;
    st.quantiles.push_back(sorted[std::min(idx, n - 1)]);
  }
  return st;
}

}  // namespace ydde
