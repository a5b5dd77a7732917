#include "ydde/coefficients.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ydde/errors.hpp"
#include "ydde/random.hpp"

namespace ydde {

namespace {

constexpr double kHypothesisSlack = 1e-6;

Eigen::MatrixXd scalar_matrix(double v) { return Eigen::MatrixXd::Constant(1, 1, v); }
Eigen::VectorXd scalar_vector(double v) { return Eigen::VectorXd::Constant(1, v); }

HypothesisConstants preset_constants(double M0, double MN, double L0, double gamma, double K0) {
  HypothesisConstants c;
  c.M0 = M0;
  c.beta = 1.0;
  c.delta = 1.0;
  c.MN = [MN](double) { return MN; };
  c.L0 = L0;
  c.LN = [L0](double) { return L0; };
  c.b0 = [](double) { return 0.0; };
  c.rho = 2.0;
  c.gamma = gamma;
  c.K0 = K0;
  return c;
}

}  // namespace

double CoefficientSet::alpha_zero() const {
  return std::min({0.5, constants.beta, constants.delta / (1.0 + constants.delta)});
}

double CoefficientSet::b0_norm(double alpha, double T) const {
  // Composite Simpson on |b0|^{1/alpha}.
  const int n = 2048;
  const double p = 1.0 / alpha;
  const double h = T / n;
  double acc = 0.0;
  for (int k = 0; k <= n; ++k) {
    const double w = (k == 0 || k == n) ? 1.0 : (k % 2 ? 4.0 : 2.0);
    acc += w * std::pow(std::abs(constants.b0(k * h)), p);
  }
  return std::pow(acc * h / 3.0, alpha);
}

Eigen::MatrixXd CoefficientSet::sigma_derivative(double t, const Eigen::VectorXd& x, Eigen::Index i) const {
  if (sigma_dx) return sigma_dx(t, x, i);
  const double eps = 1e-6 * std::max(1.0, std::abs(x(i)));
  Eigen::VectorXd up = x, down = x;
  up(i) += eps;
  down(i) -= eps;
  return (sigma(t, up) - sigma(t, down)) / (2.0 * eps);
}

CoefficientSet make_preset(const std::string& name) {
  CoefficientSet c;
  c.name = name;
  if (name == "additive") {
    c.sigma = [](double, const Eigen::VectorXd&) { return scalar_matrix(1.0); };
    c.sigma_dx = [](double, const Eigen::VectorXd&, Eigen::Index) { return scalar_matrix(0.0); };
    c.drift = Drift::pointwise([](double, const Eigen::VectorXd&) { return scalar_vector(0.0); });
    c.constants = preset_constants(0.0, 0.0, 0.0, 0.0, 1.0);
  } else if (name == "linear") {
    c.sigma = [](double, const Eigen::VectorXd& x) { return scalar_matrix(x(0)); };
    c.sigma_dx = [](double, const Eigen::VectorXd&, Eigen::Index) { return scalar_matrix(1.0); };
    c.drift = Drift::pointwise([](double, const Eigen::VectorXd& x) { return Eigen::VectorXd(-x); });
    c.constants = preset_constants(1.0, 0.0, 1.0, 1.0, 1.0);
  } else if (name == "sine") {
    c.sigma = [](double, const Eigen::VectorXd& x) { return scalar_matrix(std::sin(x(0))); };
    c.sigma_dx = [](double, const Eigen::VectorXd& x, Eigen::Index) { return scalar_matrix(std::cos(x(0))); };
    c.drift = Drift::pointwise([](double, const Eigen::VectorXd& x) { return Eigen::VectorXd(-x); });
    c.constants = preset_constants(1.0, 1.0, 1.0, 0.0, 1.0);
  } else if (name == "hereditary-sup") {
    c.sigma = [](double, const Eigen::VectorXd& x) { return scalar_matrix(std::sin(x(0))); };
    c.sigma_dx = [](double, const Eigen::VectorXd& x, Eigen::Index) { return scalar_matrix(std::cos(x(0))); };
    c.drift = Drift::hereditary([](double, const HistoryView& past) -> Eigen::VectorXd {
      return past.past().rowwise().maxCoeff();
    });
    c.constants = preset_constants(1.0, 1.0, 1.0, 0.0, 1.0);
  } else {
    throw ConfigError("unknown coefficient preset '" + name + "'");
  }
  return c;
}

std::vector<std::string> preset_names() { return {"additive", "linear", "sine", "hereditary-sup"}; }

EtaFn make_eta_preset(const std::string& name) {
  if (name == "constant") return [](double) { return scalar_vector(1.0); };
  if (name == "linear") return [](double t) { return scalar_vector(1.0 + t); };
  if (name == "cosine") return [](double t) { return scalar_vector(std::cos(t)); };
  throw ConfigError("unknown eta preset '" + name + "'");
}

std::vector<std::string> eta_preset_names() { return {"constant", "linear", "cosine"}; }

bool HypothesisReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const HypothesisCheck& c) { return c.passed; });
}

const HypothesisCheck& HypothesisReport::find(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return c;
  }
  throw Error("no hypothesis check named '" + name + "'");
}

namespace {

// Accumulates lhs <= rhs comparisons for one hypothesis.
struct Tally {
  HypothesisCheck check;

  explicit Tally(std::string name) { check.name = std::move(name); }

  void add(double lhs, double rhs) {
    ++check.samples;
    const double ratio = rhs > 0.0 ? lhs / rhs : (lhs > 1e-12 ? std::numeric_limits<double>::infinity() : 0.0);
    check.worst_ratio = std::max(check.worst_ratio, ratio);
    if (lhs > rhs * (1.0 + kHypothesisSlack) + 1e-12) check.passed = false;
  }
};

class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : stream_(derive_seed(seed, "hypotheses", 0)) {}
  double uniform(double lo, double hi) { return lo + (hi - lo) * stream_.uniform(counter_++); }
  Eigen::VectorXd point(Eigen::Index d, double box) {
    Eigen::VectorXd x(d);
    for (Eigen::Index i = 0; i < d; ++i) x(i) = uniform(-box, box);
    return x;
  }

 private:
  GaussianStream stream_;
  std::uint64_t counter_ = 0;
};

// Random-walk path with |x| <= box on a short grid, for hereditary drifts.
Eigen::MatrixXd sample_history(Sampler& s, Eigen::Index d, Eigen::Index cols, double box) {
  Eigen::MatrixXd v(d, cols);
  v.col(0) = s.point(d, box);
  for (Eigen::Index k = 1; k < cols; ++k) {
    for (Eigen::Index i = 0; i < d; ++i) {
      v(i, k) = std::clamp(v(i, k - 1) + s.uniform(-0.2, 0.2) * box, -box, box);
    }
  }
  return v;
}

}  // namespace

HypothesisReport validate_hypotheses(const CoefficientSet& coeffs, const HypothesisSampling& sampling) {
  const auto& k = coeffs.constants;
  const double N = sampling.box;
  const double T = sampling.T;
  Sampler s(sampling.seed);

  Tally lipschitz("sigma Lipschitz");
  Tally derivative("sigma derivative Hoelder");
  Tally time_reg("sigma time Hoelder");
  Tally drift_lip("drift local Lipschitz");
  Tally drift_growth("drift growth");
  Tally growth("sigma growth");

  const double MN = k.MN(N);
  const double LN = k.LN(N);
  const TimeGrid grid = make_history_grid(T, 32, 8);
  const auto cols = static_cast<Eigen::Index>(grid.size());

  for (std::size_t it = 0; it < sampling.budget; ++it) {
    const double t = s.uniform(0.0, T);
    const double u = s.uniform(0.0, T);
    const Eigen::VectorXd x = s.point(coeffs.d, N);
    const Eigen::VectorXd y = s.point(coeffs.d, N);
    const double dist = (x - y).norm();

    lipschitz.add((coeffs.sigma(t, x) - coeffs.sigma(t, y)).norm(), k.M0 * dist);

    double time_lhs = (coeffs.sigma(t, x) - coeffs.sigma(u, x)).norm();
    for (Eigen::Index i = 0; i < coeffs.d; ++i) {
      derivative.add((coeffs.sigma_derivative(t, x, i) - coeffs.sigma_derivative(t, y, i)).norm(),
                     MN * std::pow(dist, k.delta));
      time_reg.add(time_lhs + (coeffs.sigma_derivative(t, x, i) - coeffs.sigma_derivative(u, x, i)).norm(),
                   k.M0 * std::pow(std::abs(t - u), k.beta));
    }

    growth.add(coeffs.sigma(t, x).norm(), k.K0 * (1.0 + std::pow(x.norm(), k.gamma)));

    if (coeffs.drift.is_pointwise()) {
      const auto& b = coeffs.drift.pointwise_fn();
      drift_lip.add((b(t, x) - b(t, y)).norm(), LN * dist);
      drift_growth.add(b(t, x).norm(), k.L0 * x.norm() + k.b0(t));
    } else {
      const Eigen::MatrixXd px = sample_history(s, coeffs.d, cols, N);
      const Eigen::MatrixXd py = sample_history(s, coeffs.d, cols, N);
      const auto now = static_cast<std::size_t>(s.uniform(static_cast<double>(grid.origin()),
                                                          static_cast<double>(cols - 1)));
      const HistoryView vx(grid, px, now);
      const HistoryView vy(grid, py, now);
      const double tn = grid.time(now);
      const double sup_gap = (vx.past() - vy.past()).colwise().norm().maxCoeff();
      const double sup_x = vx.past().colwise().norm().maxCoeff();
      drift_lip.add((coeffs.drift(tn, vx) - coeffs.drift(tn, vy)).norm(), LN * sup_gap);
      drift_growth.add(coeffs.drift(tn, vx).norm(), k.L0 * sup_x + k.b0(tn));
    }
  }

  HypothesisReport rep;
  for (auto* t : {&lipschitz, &derivative, &time_reg, &drift_lip, &drift_growth, &growth}) {
    rep.checks.push_back(t->check);
  }
  return rep;
}

}  // namespace ydde
