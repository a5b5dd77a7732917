#include "ydde/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "ydde/errors.hpp"

namespace ydde {

std::string to_string(Scheme s) { return s == Scheme::euler ? "euler" : "picard"; }

Scheme parse_scheme(const std::string& name) {
  if (name == "euler") return Scheme::euler;
  if (name == "picard") return Scheme::picard;
  throw ConfigError("unknown scheme '" + name + "' (expected euler or picard)");
}

double phi_gamma_alpha(double gamma, double alpha) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw Error("gamma must lie in [0, 1]");
  if (!(alpha > 0.0 && alpha < 0.5)) throw Error("alpha must lie in (0, 1/2)");
  if (gamma == 1.0) return 2.0 * alpha;
  if (gamma < (1.0 - 2.0 * alpha) / (1.0 - alpha)) return alpha;
  const double lower = 1.0 + (2.0 * alpha - 1.0) / gamma;
  return 0.5 * (lower + 2.0 * alpha);
}

double default_picard_lambda(double lambda_alpha_driver, double alpha) {
  return std::max(1.0, std::pow(4.0 * (1.0 + lambda_alpha_driver), 1.0 / (1.0 - 2.0 * alpha)));
}

TheoremRegime theorem_regime(const CoefficientSet& coeffs, double hurst, double alpha) {
  TheoremRegime reg;
  reg.alpha_zero = coeffs.alpha_zero();
  const bool lower = alpha > 1.0 - hurst;
  reg.existence = lower && alpha < reg.alpha_zero && coeffs.constants.rho <= 1.0 / alpha;
  reg.moments = lower && alpha < std::max(reg.alpha_zero, (2.0 - coeffs.constants.gamma) / 4.0);
  return reg;
}

Segment align_eta(const Segment& eta, const TimeGrid& grid) {
  const double rel = std::abs(eta.grid().step() - grid.step()) / grid.step();
  if (rel > kDelayAlignTolerance) throw GridMismatch("initial segment step differs from the solver grid");
  if (eta.n_history() < grid.n_history()) {
    throw GridMismatch("initial segment does not cover [-r, 0]");
  }
  if (eta.dim() < 1) throw Error("empty initial segment");
  const auto keep = static_cast<Eigen::Index>(grid.n_history() + 1);
  Eigen::MatrixXd full(eta.dim(), static_cast<Eigen::Index>(grid.size()));
  full.leftCols(keep) = eta.history_values().rightCols(keep);
  full.rightCols(full.cols() - keep) = eta.initial_value().replicate(1, full.cols() - keep);
  return Segment(Path(grid, std::move(full)));
}

namespace {

struct Prepared {
  Segment eta;
  Path driver;  // main segment of g
  std::size_t lag = 0;
};

Prepared prepare(const CoefficientSet& coeffs, const Segment& eta, const Path& g, const SolverConfig& cfg) {
  const TimeGrid& grid = cfg.grid;
  if (!g.grid().same_main_segment(grid)) throw GridMismatch("driver does not live on the solver grid");
  if (g.dim() != coeffs.m) throw GridMismatch("driver dimension differs from the coefficient set's m");
  Segment aligned = align_eta(eta, grid);
  if (aligned.dim() != coeffs.d) throw GridMismatch("initial segment dimension differs from d");
  return Prepared{std::move(aligned), g.main_segment(), grid.n_history()};
}

Eigen::MatrixXd history_filled(const Segment& eta, const TimeGrid& grid) {
  Eigen::MatrixXd x(eta.dim(), static_cast<Eigen::Index>(grid.size()));
  const auto keep = static_cast<Eigen::Index>(grid.n_history() + 1);
  x.leftCols(keep) = eta.history_values();
  x.rightCols(x.cols() - keep) = eta.initial_value().replicate(1, x.cols() - keep);
  return x;
}

// One application of the integral operator L to the path y (same layout as the output).
Eigen::MatrixXd apply_operator(const CoefficientSet& coeffs, const Prepared& p, const TimeGrid& grid,
                               const Eigen::MatrixXd& y) {
  const std::size_t origin = grid.origin();
  const std::size_t n = grid.n_main();
  const double h = grid.step();
  Eigen::MatrixXd out = history_filled(p.eta, grid);
  Eigen::VectorXd acc = p.eta.initial_value();
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t gi = origin + k;
    const double t = grid.time(gi);
    const HistoryView past(grid, y, gi);
    const Eigen::VectorXd delayed = y.col(static_cast<Eigen::Index>(gi - p.lag));
    const auto kk = static_cast<Eigen::Index>(k);
    acc += coeffs.drift(t, past) * h +
           coeffs.sigma(t, delayed) * (p.driver.values().col(kk + 1) - p.driver.values().col(kk));
    if (!acc.allFinite()) throw Divergence("Picard iterate became non-finite", static_cast<long>(gi + 1));
    out.col(static_cast<Eigen::Index>(gi + 1)) = acc;
  }
  return out;
}

void attach_reports(SolutionBundle& bundle, const CoefficientSet& coeffs, const Segment& eta, const Path& g,
                    const SolverConfig& cfg) {
  if (!cfg.compute_reports) return;
  if (bundle.lambda_used == 0.0) {
    bundle.lambda_used = cfg.lambda > 0.0 ? cfg.lambda : default_picard_lambda(lambda_alpha(g, cfg.alpha), cfg.alpha);
  }
  bundle.norm_report = norm_report(bundle.path, g, cfg.alpha, bundle.lambda_used, cfg.delta, cfg.delay());
  bundle.a_priori = a_priori_bound_report(bundle, coeffs, eta, g, cfg.alpha);
}

}  // namespace

SolutionBundle solve_euler(const CoefficientSet& coeffs, const Segment& eta, const Path& g,
                           const SolverConfig& cfg) {
  const TimeGrid& grid = cfg.grid;
  const Prepared p = prepare(coeffs, eta, g, cfg);
  const std::size_t origin = grid.origin();
  const double h = grid.step();

  Eigen::MatrixXd x = history_filled(p.eta, grid);
  for (std::size_t k = 0; k < grid.n_main(); ++k) {
    const std::size_t gi = origin + k;
    const double t = grid.time(gi);
    const HistoryView past(grid, x, gi);
    const auto kk = static_cast<Eigen::Index>(k);
    const auto cur = static_cast<Eigen::Index>(gi);
    const Eigen::VectorXd delayed = x.col(static_cast<Eigen::Index>(gi - p.lag));
    Eigen::VectorXd next = x.col(cur) + coeffs.drift(t, past) * h +
                           coeffs.sigma(t, delayed) * (p.driver.values().col(kk + 1) - p.driver.values().col(kk));
    if (!next.allFinite()) throw Divergence("Euler scheme produced a non-finite value", static_cast<long>(gi + 1));
    x.col(cur + 1) = next;
  }

  SolutionBundle bundle;
  bundle.path = Path(grid, std::move(x));
  bundle.scheme_used = Scheme::euler;
  attach_reports(bundle, coeffs, p.eta, g, cfg);
  return bundle;
}

SolutionBundle solve_picard(const CoefficientSet& coeffs, const Segment& eta, const Path& g,
                            const SolverConfig& cfg, const std::optional<Path>& initial) {
  const TimeGrid& grid = cfg.grid;
  const Prepared p = prepare(coeffs, eta, g, cfg);
  const double lambda =
      cfg.lambda > 0.0 ? cfg.lambda : default_picard_lambda(lambda_alpha(p.driver, cfg.alpha), cfg.alpha);

  Eigen::MatrixXd y;
  if (initial) {
    if (!(initial->grid() == grid) || initial->dim() != coeffs.d) {
      throw GridMismatch("initial Picard iterate does not live on the solver grid");
    }
    y = initial->values();
  } else {
    y = history_filled(p.eta, grid);
  }

  SolutionBundle bundle;
  bundle.scheme_used = Scheme::picard;
  bundle.lambda_used = lambda;
  bundle.converged = false;
  const double r = cfg.delay();
  for (int it = 1; it <= cfg.picard_max_iter; ++it) {
    Eigen::MatrixXd next = apply_operator(coeffs, p, grid, y);
    const Path diff(grid, next - y);
    bundle.iterations = it;
    bundle.residual = norm_alpha_infty(diff, cfg.alpha, r);
    bundle.weighted_residual = norm_alpha_lambda(diff, cfg.alpha, lambda, r);
    y = std::move(next);
    if (bundle.residual < cfg.picard_tol) {
      bundle.converged = true;
      break;
    }
  }
  bundle.path = Path(grid, std::move(y));
  attach_reports(bundle, coeffs, p.eta, g, cfg);
  return bundle;
}

SolutionBundle solve(const CoefficientSet& coeffs, const Segment& eta, const Path& g, const SolverConfig& cfg) {
  return cfg.scheme == Scheme::euler ? solve_euler(coeffs, eta, g, cfg) : solve_picard(coeffs, eta, g, cfg);
}

APrioriRecord a_priori_bound_report(const SolutionBundle& bundle, const CoefficientSet& coeffs,
                                    const Segment& eta, const Path& g, double alpha) {
  const TimeGrid& grid = bundle.path.grid();
  APrioriRecord rec;
  rec.lambda_alpha_driver = lambda_alpha(g, alpha);
  rec.eta_norm = norm_alpha_infty(align_eta(eta, grid), alpha);
  rec.phi = phi_gamma_alpha(coeffs.constants.gamma, alpha);
  rec.exponent = 1.0 / (1.0 - rec.phi);
  rec.measured_norm = norm_alpha_infty(bundle.path, alpha, grid.delay());
  rec.structural_value =
      (rec.eta_norm + rec.lambda_alpha_driver + 1.0) * std::exp(std::pow(rec.lambda_alpha_driver, rec.exponent));
  return rec;
}

APrioriFit fit_a_priori_constants(std::span<const APrioriRecord> batch) {
  if (batch.empty()) throw Error("cannot fit a-priori constants on an empty batch");
  std::vector<double> y, z;
  for (const auto& r : batch) {
    y.push_back(std::log(r.measured_norm / (r.eta_norm + r.lambda_alpha_driver + 1.0)));
    z.push_back(std::pow(r.lambda_alpha_driver, r.exponent));
  }
  const double n = static_cast<double>(y.size());
  const double zm = std::accumulate(z.begin(), z.end(), 0.0) / n;
  const double ym = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    sxy += (z[i] - zm) * (y[i] - ym);
    sxx += (z[i] - zm) * (z[i] - zm);
  }
  APrioriFit fit;
  fit.d8 = sxx > 0.0 ? std::max(0.0, sxy / sxx) : 0.0;
  double log_d6 = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < y.size(); ++i) log_d6 = std::max(log_d6, y[i] - fit.d8 * z[i]);
  fit.d6 = std::exp(log_d6);
  return fit;
}

}  // namespace ydde
