#pragma once

#include <optional>
#include <span>
#include <string>

#include "ydde/coefficients.hpp"
#include "ydde/frac_norms.hpp"
#include "ydde/path.hpp"

namespace ydde {

enum class Scheme { euler, picard };

std::string to_string(Scheme s);
Scheme parse_scheme(const std::string& name);

struct SolverConfig {
  double alpha = 0.3;
  /// Weight of the contraction norm; 0 selects default_picard_lambda().
  double lambda = 0.0;
  /// Grid on [-r, T]; the delay is grid.delay().
  TimeGrid grid = make_grid(1.0, 4096, 0.0);
  Scheme scheme = Scheme::euler;
  double picard_tol = 1e-8;
  int picard_max_iter = 50;
  /// Exponent of the Delta_r entry of the norm report.
  double delta = 1.0;
  /// Attach NormReport and a-priori quantities to the bundle (O(n^2) each).
  bool compute_reports = true;

  double delay() const { return grid.delay(); }
};

/// Quantities entering the a-priori bound
///   ||x||_{alpha,inf(r)} <= d6 (||eta||_{alpha,inf(-r,0)} + Lambda + 1) exp(d7 + d8 Lambda^{1/(1-phi)}).
struct APrioriRecord {
  double lambda_alpha_driver = 0;
  double eta_norm = 0;
  double phi = 0;
  double exponent = 0;        // 1 / (1 - phi)
  double measured_norm = 0;   // ||x||_{alpha,inf(r)}
  double structural_value = 0;  // (eta + Lambda + 1) exp(Lambda^exponent), unit constants
};

/// Which theorem hypotheses on alpha a run satisfies.
struct TheoremRegime {
  double alpha_zero = 0.5;
  bool existence = false;  // alpha in (1-H, alpha_0) and rho <= 1/alpha
  bool moments = false;    // alpha in (1-H, max(alpha_0, (2-gamma)/4))
};

struct SolutionBundle {
  Path path;  // on [-r, T], equal to eta on [-r, 0]
  Scheme scheme_used = Scheme::euler;
  int iterations = 0;
  bool converged = true;
  double residual = 0;           // last ||y_{k+1} - y_k||_{alpha,inf(r)}
  double weighted_residual = 0;  // same in ||.||_{alpha,lambda(r)}
  double lambda_used = 0;
  std::optional<NormReport<double>> norm_report;
  std::optional<APrioriRecord> a_priori;
};

/// phi(gamma, alpha): 2 alpha at gamma = 1, alpha below (1-2alpha)/(1-alpha),
/// otherwise the midpoint of (1 + (2alpha-1)/gamma, 2 alpha].
double phi_gamma_alpha(double gamma, double alpha);

/// lambda = max(1, (4 (1 + Lambda_alpha(g)))^{1/(1-2alpha)}).
double default_picard_lambda(double lambda_alpha_driver, double alpha);

TheoremRegime theorem_regime(const CoefficientSet& coeffs, double hurst, double alpha);

/// Explicit scheme
///   X(t_{k+1}) = X(t_k) + b(t_k, X|[-r,t_k]) h + sigma(t_k, X(t_k - r)) (g(t_{k+1}) - g(t_k)).
/// eta must share the grid step and cover at least [-r, 0]; g must share [0, T].
SolutionBundle solve_euler(const CoefficientSet& coeffs, const Segment& eta, const Path& g,
                           const SolverConfig& cfg);

/// Fixed-point iteration y_{k+1} = L(y_k) of the integral operator
///   L(y)(t) = eta(0) + int_0^t b(s, y) ds + int_0^t sigma(s, y(s-r)) dg_s,  L(y) = eta on [-r, 0],
/// starting from eta extended by eta(0), or from `initial` when given.
SolutionBundle solve_picard(const CoefficientSet& coeffs, const Segment& eta, const Path& g,
                            const SolverConfig& cfg, const std::optional<Path>& initial = std::nullopt);

SolutionBundle solve(const CoefficientSet& coeffs, const Segment& eta, const Path& g, const SolverConfig& cfg);

APrioriRecord a_priori_bound_report(const SolutionBundle& bundle, const CoefficientSet& coeffs,
                                    const Segment& eta, const Path& g, double alpha);

/// Smallest constants making the a-priori bound hold over a batch, with d7 folded into d6.
struct APrioriFit {
  double d6 = 0;
  double d8 = 0;
};
APrioriFit fit_a_priori_constants(std::span<const APrioriRecord> batch);

/// eta restricted to the history of grid (same step, at least as long).
Segment align_eta(const Segment& eta, const TimeGrid& grid);

}  // namespace ydde
