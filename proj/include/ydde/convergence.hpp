#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <vector>

#include "ydde/coefficients.hpp"
#include "ydde/fbm.hpp"
#include "ydde/solver.hpp"

namespace ydde {

/// Distances between the no-delay solution X and the delayed solutions X^r.
/// Rows are seeds, columns follow `delays`.
struct ConvergenceReport {
  std::vector<double> delays;
  std::vector<std::uint64_t> seeds;
  Eigen::MatrixXd dist_alpha;  // ||X - X^r||_{alpha,inf} on [0, T]
  Eigen::MatrixXd dist_sup;    // sup_t |X(t) - X^r(t)| on [0, T]
  std::vector<double> lambda_alpha_samples;

  std::vector<double> p_list;
  Eigen::MatrixXd lp_means;   // rows follow p_list, columns follow delays
  Eigen::MatrixXd lp_stderr;
  std::vector<double> dominating;  // per seed, max over r of dist_alpha
};

enum class DistanceMetric { alpha_norm, sup_norm };

/// Single driver path: solves the r = 0 equation and every delayed one with
/// the explicit scheme on one grid family (same step, same driver on [0, T]).
/// Requires a pointwise drift; hereditary drifts are rejected.
ConvergenceReport pathwise_convergence_study(const CoefficientSet& coeffs, const EtaFn& eta, const Path& g,
                                             double alpha, const std::vector<double>& delays);

struct StudyConfig {
  double hurst = 0.75;
  double alpha = 0.3;
  double T = 1.0;
  std::size_t n = 4096;
  std::vector<double> delays;  // default T * 2^{-k}, k = 2..8
  std::vector<double> p_list{1.0, 2.0};
  int n_seeds = 100;
  std::uint64_t master_seed = 20080101;
  FbmMethod method = FbmMethod::circulant_embedding;
  int parallelism = 1;
};

std::vector<double> default_delays(double T);

/// Seed i of a study uses derive_seed(master_seed, "driver", i).
std::uint64_t study_seed(std::uint64_t master_seed, std::size_t index);

/// Monte Carlo over independent fBm drivers; every delay of one seed reuses that seed's driver.
ConvergenceReport lp_convergence_study(const CoefficientSet& coeffs, const EtaFn& eta, const StudyConfig& cfg);

struct LogLogFit {
  double slope = 0;
  double intercept = 0;
  std::size_t points = 0;
};

/// Least-squares slope of log(distance) against log(r) over the positive points.
/// Throws when fewer than four are usable.
LogLogFit fit_log_log(const std::vector<double>& delays, const std::vector<double>& distances);

struct SlopeSummary {
  std::vector<double> per_seed;
  double median = 0;
};

SlopeSummary rate_fit(const ConvergenceReport& report, DistanceMetric metric);

struct GateResult {
  double endpoint_exception_fraction = 0;  // seeds where d(r_min) >= d(r_max)
  bool endpoint_ok = false;
  double median_slope = 0;
  double slope_threshold = 0;
  bool slope_ok = false;
  std::vector<double> lp_ratio;  // mean at r_max / mean at r_min, per p
  bool lp_ok = false;
  bool passed() const { return endpoint_ok && slope_ok && lp_ok; }
};

inline constexpr double kEndpointExceptionAllowance = 0.05;
inline constexpr double kSlopeTolerance = 0.15;
inline constexpr double kLpDecreaseFactor = 4.0;

/// Endpoint decrease, median alpha-norm slope >= 1 - 2 alpha - 0.15, and L^p means
/// decreasing by at least 4x between the largest and smallest delay.
GateResult evaluate_gates(const ConvergenceReport& report, double alpha);

struct BatchStat {
  double mean = 0;
  double stderr_ = 0;
};

struct FerniqueStatistics {
  std::vector<double> samples;  // Lambda_alpha(W) per seed
  bool all_finite = true;
  std::vector<double> moment_orders{1.0, 2.0, 4.0};
  std::vector<double> moments;
  std::vector<double> exp_powers{0.5, 1.0, 1.5};
  std::vector<double> exp_means;  // mean of exp(Lambda^delta)
  std::vector<double> quantile_levels{0.5, 0.9, 0.99};
  std::vector<double> quantiles;
};

FerniqueStatistics fernique_statistics(const StudyConfig& cfg);

/// Mean and standard error of a statistic over samples[first, first + count).
BatchStat batch_statistic(const std::vector<double>& samples, std::size_t first, std::size_t count,
                          const std::function<double(double)>& transform);

/// Runs fn(i) for i in [0, count) on up to `parallelism` threads.
void parallel_for(std::size_t count, int parallelism, const std::function<void(std::size_t)>& fn);

}  // namespace ydde
