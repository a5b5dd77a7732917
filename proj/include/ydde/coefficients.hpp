#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ydde/young.hpp"

namespace ydde {

using SigmaFn = std::function<Eigen::MatrixXd(double t, const Eigen::VectorXd& x)>;
/// d/dx_i sigma(t, x), a d x m matrix.
using SigmaDerivativeFn = std::function<Eigen::MatrixXd(double t, const Eigen::VectorXd& x, Eigen::Index i)>;
using ScalarTimeFn = std::function<double(double t)>;
using ConstantOfN = std::function<double(double N)>;

/// Declared constants of the regularity hypotheses on sigma and b.
struct HypothesisConstants {
  // sigma: Lipschitz constant, time-Hoelder exponent, derivative-Hoelder exponent.
  double M0 = 1.0;
  double beta = 1.0;
  double delta = 1.0;
  ConstantOfN MN = [](double) { return 1.0; };
  // b: linear growth and local Lipschitz constants, with integrable b0 in L^rho.
  double L0 = 1.0;
  ConstantOfN LN = [](double) { return 1.0; };
  ScalarTimeFn b0 = [](double) { return 0.0; };
  double rho = 2.0;
  // sigma growth |sigma(t,x)| <= K0 (1 + |x|^gamma).
  double gamma = 1.0;
  double K0 = 1.0;
};

/// The pair (b, sigma) of the delay equation with its hypothesis metadata.
struct CoefficientSet {
  std::string name;
  Eigen::Index d = 1;
  Eigen::Index m = 1;
  SigmaFn sigma;
  SigmaDerivativeFn sigma_dx;  // optional; finite differences when empty
  Drift drift;
  HypothesisConstants constants;

  /// alpha_0 = min(1/2, beta, delta / (1 + delta)).
  double alpha_zero() const;

  /// B_{0,alpha} = ||b0||_{L^{1/alpha}(0,T)}.
  double b0_norm(double alpha, double T) const;

  Eigen::MatrixXd sigma_derivative(double t, const Eigen::VectorXd& x, Eigen::Index i) const;
};

/// Shipped presets: additive, linear, sine, hereditary-sup (all d = m = 1).
CoefficientSet make_preset(const std::string& name);
std::vector<std::string> preset_names();

/// Initial segments eta(t), t <= 0, by name: constant (1), linear (1 + t), cosine (cos t).
using EtaFn = std::function<Eigen::VectorXd(double t)>;
EtaFn make_eta_preset(const std::string& name);
std::vector<std::string> eta_preset_names();

struct HypothesisCheck {
  std::string name;
  double worst_ratio = 0;  // max observed lhs / rhs
  std::size_t samples = 0;
  bool passed = true;
};

struct HypothesisReport {
  std::vector<HypothesisCheck> checks;
  bool all_passed() const;
  const HypothesisCheck& find(const std::string& name) const;
};

struct HypothesisSampling {
  std::size_t budget = 2000;
  double box = 10.0;  // |x| <= box, also the N of the local constants
  double T = 1.0;
  std::uint64_t seed = 1;
};

/// Samples (t, s, x, y) and compares each hypothesis inequality against the
/// declared constants with 1e-6 relative slack. Violations are reported, not thrown.
HypothesisReport validate_hypotheses(const CoefficientSet& coeffs, const HypothesisSampling& sampling);

}  // namespace ydde
