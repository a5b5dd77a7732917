#pragma once

#include <Eigen/Core>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>

#include "ydde/path.hpp"

namespace ydde {

/// Read-only view of a path on [-r, t_k]: nodes past the current one cannot be
/// reached through it, which is what makes a drift functional hereditary.
class HistoryView {
 public:
  HistoryView(const TimeGrid& grid, const Eigen::MatrixXd& values, std::size_t current)
      : grid_(&grid), values_(&values), current_(current) {}

  std::size_t current_index() const { return current_; }
  double now() const { return grid_->time(current_); }
  const TimeGrid& grid() const { return *grid_; }
  Eigen::Index dim() const { return values_->rows(); }

  Eigen::MatrixXd::ConstColXpr current() const { return values_->col(static_cast<Eigen::Index>(current_)); }
  Eigen::MatrixXd::ConstColXpr at(std::size_t k) const;

  /// Columns 0..current, i.e. the path on [-r, now()].
  auto past() const { return values_->leftCols(static_cast<Eigen::Index>(current_ + 1)); }

 private:
  const TimeGrid* grid_;
  const Eigen::MatrixXd* values_;
  std::size_t current_;
};

using PointwiseDriftFn = std::function<Eigen::VectorXd(double t, const Eigen::VectorXd& x)>;
using HereditaryDriftFn = std::function<Eigen::VectorXd(double t, const HistoryView& past)>;

/// Drift b(t, x). Either hereditary, reading the whole past {x(u): -r <= u <= t},
/// or pointwise, reading x(t) only.
class Drift {
 public:
  Drift() : Drift(pointwise([](double, const Eigen::VectorXd& x) -> Eigen::VectorXd {
              return Eigen::VectorXd::Zero(x.size());
            })) {}

  static Drift pointwise(PointwiseDriftFn fn);
  static Drift hereditary(HereditaryDriftFn fn);

  Eigen::VectorXd operator()(double t, const HistoryView& past) const;

  bool is_pointwise() const { return static_cast<bool>(pointwise_); }
  const PointwiseDriftFn& pointwise_fn() const { return pointwise_; }

 private:
  explicit Drift(std::nullptr_t) {}

  PointwiseDriftFn pointwise_;
  HereditaryDriftFn hereditary_;
};

struct BoundCertificate {
  double lambda_alpha = 0;
  double norm_alpha_1 = 0;
  double bound = 0;     // Lambda_alpha(g) * ||f||_{alpha,1}
  double measured = 0;  // |int_0^T f dg|
  bool holds = true;
};

struct IntegralResult {
  Path path;  // t -> int_0^t f dg on [0, T]
  std::optional<BoundCertificate> bound_certificate;
};

/// Absolute and relative slack used by every inequality check.
inline constexpr double kBoundSlackAbs = 1e-8;
inline constexpr double kBoundSlackRel = 1e-6;

inline bool within_bound(double lhs, double rhs) {
  return lhs <= rhs + kBoundSlackAbs + kBoundSlackRel * std::abs(rhs);
}

/// Left-point Riemann-Stieltjes sums sum_k f(t_k) (g(t_{k+1}) - g(t_k)) over [0, T].
///
/// g has m components; f has d*m rows holding a column-major d x m matrix per
/// node and the result is R^d valued. When alpha is given, the certificate
/// |int_0^T f dg| <= Lambda_alpha(g) ||f||_{alpha,1} is attached.
IntegralResult young_integral(const Path& f, const Path& g, std::optional<double> alpha = std::nullopt);

/// Left-point quadrature of s -> b(s, x restricted to [-r, s]) on [0, T].
Path drift_integral(const Drift& b, const Path& x);

struct NrBoundReport {
  std::size_t nodes_checked = 0;
  // |G(f)(t)| <= Lambda (int |f(s)| s^{-alpha} ds + alpha * double integral)
  std::size_t pointwise_violations = 0;
  double pointwise_worst_slack = 0;  // min over nodes of rhs - lhs
  // int |G(t)-G(s)| (t-s)^{-alpha-1} ds <= Lambda (C int |f|(t-s)^{-2alpha} + double integral)
  double increment_fitted_constant = 0;  // smallest C making it hold at every node
  std::size_t increment_violations = 0;  // nodes no finite C can fix
};

/// Checks the two integral bounds for G(f)(t) = int_0^t f dg at every node of
/// [0, T]. f and g are scalar paths on the same grid.
NrBoundReport check_nr_bounds(const Path& f, const Path& g, double alpha);

using ScalarSigmaFn = std::function<double(double t, double x)>;

struct SigmaBoundConstants {
  double alpha = 0.3;
  double beta = 1.0;
  double delta = 1.0;
  double M0 = 1.0;
  double MN = 1.0;
};

struct SigmaBoundReport {
  std::size_t nodes_checked = 0;
  std::size_t violations = 0;
  double worst_slack = 0;
  double worst_ratio = 0;  // max lhs / rhs over nodes with rhs > 0
};

/// Evaluates, at every node t of [0, T],
///
///   int_0^t |s(t,f_t) - s(u,f_u) - s(t,h_t) + s(u,h_u)| (t-u)^{-a-1} du
///     <= M0 int_0^t |f_t - f_u - h_t + h_u| (t-u)^{-a-1} du + M0/(b-a) |f_t-h_t| t^{b-a}
///        + MN |f_t - h_t| ( int_0^t |f_t-f_u|^d (t-u)^{-a-1} du + same for h ).
SigmaBoundReport check_sigma_increment_bound(const ScalarSigmaFn& sigma, const Path& f, const Path& h,
                                             const SigmaBoundConstants& c);

}  // namespace ydde
