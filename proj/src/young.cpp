#include "ydde/young.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "ydde/frac_norms.hpp"
#include "ydde/quadrature.hpp"

namespace ydde {

Eigen::MatrixXd::ConstColXpr HistoryView::at(std::size_t k) const {
  if (k > current_) throw Error("drift functional tried to read the path beyond the current time");
  return values_->col(static_cast<Eigen::Index>(k));
}

Drift Drift::pointwise(PointwiseDriftFn fn) {
  Drift d(nullptr);
  d.pointwise_ = std::move(fn);
  return d;
}

Drift Drift::hereditary(HereditaryDriftFn fn) {
  Drift d(nullptr);
  d.hereditary_ = std::move(fn);
  return d;
}

Eigen::VectorXd Drift::operator()(double t, const HistoryView& past) const {
  if (pointwise_) return pointwise_(t, past.current());
  return hereditary_(t, past);
}

namespace {

void require_common_main(const Path& a, const Path& b) {
  if (!a.grid().same_main_segment(b.grid())) {
    throw GridMismatch("paths do not share the same grid on [0, T]");
  }
}

}  // namespace

IntegralResult young_integral(const Path& f, const Path& g, std::optional<double> alpha) {
  require_common_main(f, g);
  const Path fm = f.main_segment();
  const Path gm = g.main_segment();
  const Eigen::Index m = gm.dim();
  if (fm.dim() % m != 0) {
    throw GridMismatch("integrand rows must be a multiple of the driver dimension");
  }
  const Eigen::Index d = fm.dim() / m;
  const auto n = static_cast<Eigen::Index>(fm.grid().n_main());

  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(d, n + 1);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Map<const Eigen::MatrixXd> sigma(fm.values().col(k).data(), d, m);
    out.col(k + 1) = out.col(k) + sigma * (gm.values().col(k + 1) - gm.values().col(k));
  }

  IntegralResult res{Path(fm.grid(), std::move(out)), std::nullopt};
  if (alpha) {
    BoundCertificate cert;
    cert.lambda_alpha = lambda_alpha(gm, *alpha);
    // Integrand column c (the d-vector multiplying dg_c) is bounded separately.
    double norm_sum = 0.0;
    for (Eigen::Index c = 0; c < m; ++c) {
      Path column(fm.grid(), fm.values().middleRows(c * d, d));
      norm_sum += norm_alpha_1(column, *alpha);
    }
    cert.norm_alpha_1 = norm_sum;
    cert.bound = cert.lambda_alpha * cert.norm_alpha_1;
    cert.measured = res.path.at(res.path.size() - 1).norm();
    cert.holds = within_bound(cert.measured, cert.bound);
    res.bound_certificate = cert;
  }
  return res;
}

Path drift_integral(const Drift& b, const Path& x) {
  const TimeGrid& grid = x.grid();
  const std::size_t origin = grid.origin();
  const std::size_t n = grid.n_main();
  const double h = grid.step();
  const Eigen::MatrixXd& values = x.values();

  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(x.dim(), static_cast<Eigen::Index>(n + 1));
  for (std::size_t k = 0; k < n; ++k) {
    const HistoryView past(grid, values, origin + k);
    const auto kk = static_cast<Eigen::Index>(k);
    out.col(kk + 1) = out.col(kk) + h * b(grid.time(origin + k), past);
  }
  return Path(grid.with_history(0), std::move(out));
}

NrBoundReport check_nr_bounds(const Path& f, const Path& g, double alpha) {
  require_common_main(f, g);
  if (f.dim() != 1 || g.dim() != 1) throw Error("check_nr_bounds expects scalar paths");
  const Path fm = f.main_segment();
  const Path gm = g.main_segment();
  const std::size_t n = fm.grid().n_main();
  const double h = fm.grid().step();
  const auto fv = fm.values().row(0);
  auto fa = [&](std::size_t k) { return fv(static_cast<Eigen::Index>(k)); };

  const Path G = young_integral(fm, gm).path;
  const auto Gv = G.values().row(0);
  const double lam = lambda_alpha(gm, alpha);

  KernelWeights<double> w_alpha(alpha, h, n);
  KernelWeights<double> w_sing(alpha + 1.0, h, n);
  KernelWeights<double> w_2alpha(2.0 * alpha, h, n);

  // int_0^t |f(s)| s^{-alpha} ds and the double singular integral, both cumulative.
  std::vector<double> first(n + 1, 0.0);
  for (std::size_t k = 1; k <= n; ++k) {
    first[k] = first[k - 1] + w_alpha.cell(k, std::abs(fa(k - 1)), std::abs(fa(k)));
  }
  const std::vector<double> second = cumulative_trapezoid(detail::singular_profile(fm.values(), h, alpha), h);
  const std::vector<double> g_profile = detail::singular_profile(G.values(), h, alpha);

  NrBoundReport rep;
  rep.pointwise_worst_slack = std::numeric_limits<double>::infinity();
  std::vector<double> inner(n + 1, 0.0);  // J(y_k, t_i)
  double fitted = 0.0;

  for (std::size_t i = 0; i <= n; ++i) {
    ++rep.nodes_checked;
    const double lhs = std::abs(Gv(static_cast<Eigen::Index>(i)));
    const double rhs = lam * (first[i] + alpha * second[i]);
    rep.pointwise_worst_slack = std::min(rep.pointwise_worst_slack, rhs - lhs);
    if (!within_bound(lhs, rhs)) ++rep.pointwise_violations;

    if (i == 0) continue;
    for (std::size_t k = 0; k < i; ++k) {
      inner[k] += w_sing.cell(i - k, std::abs(fa(i - 1) - fa(k)), std::abs(fa(i) - fa(k)));
    }
    inner[i] = 0.0;
    const double a_term = w_2alpha.integrate(i, [&](std::size_t j) { return std::abs(fa(i - j)); });
    const double b_term = w_alpha.integrate(i, [&](std::size_t j) { return inner[i - j]; });
    const double inc_lhs = g_profile[i];
    if (lam == 0.0 || a_term == 0.0) {
      if (!within_bound(inc_lhs, lam * b_term)) ++rep.increment_violations;
      continue;
    }
    fitted = std::max(fitted, (inc_lhs / lam - b_term) / a_term);
  }
  rep.increment_fitted_constant = fitted;
  return rep;
}

SigmaBoundReport check_sigma_increment_bound(const ScalarSigmaFn& sigma, const Path& f, const Path& h,
                                             const SigmaBoundConstants& c) {
  require_common_main(f, h);
  if (f.dim() != 1 || h.dim() != 1) throw Error("check_sigma_increment_bound expects scalar paths");
  const Path fm = f.main_segment();
  const Path hm = h.main_segment();
  const std::size_t n = fm.grid().n_main();
  const double step = fm.grid().step();
  KernelWeights<double> w(c.alpha + 1.0, step, n);

  std::vector<double> fv(n + 1), hv(n + 1), sf(n + 1), sh(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    const double t = fm.time(k);
    fv[k] = fm.at(0, k);
    hv[k] = hm.at(0, k);
    sf[k] = sigma(t, fv[k]);
    sh[k] = sigma(t, hv[k]);
  }

  SigmaBoundReport rep;
  rep.worst_slack = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i <= n; ++i) {
    ++rep.nodes_checked;
    const double t = fm.time(i);
    const double lhs = w.integrate(i, [&](std::size_t j) {
      return std::abs(sf[i] - sf[i - j] - sh[i] + sh[i - j]);
    });
    const double t1 = c.M0 * w.integrate(i, [&](std::size_t j) {
      return std::abs(fv[i] - fv[i - j] - hv[i] + hv[i - j]);
    });
    const double gap = std::abs(fv[i] - hv[i]);
    double t2 = 0.0;
    if (gap > 0.0 && c.M0 > 0.0) {
      t2 = c.beta > c.alpha ? c.M0 / (c.beta - c.alpha) * gap * std::pow(t, c.beta - c.alpha)
                            : std::numeric_limits<double>::infinity();
    }
    double t3 = 0.0;
    if (gap > 0.0 && c.MN > 0.0) {
      const double pf = w.integrate(i, [&](std::size_t j) { return std::pow(std::abs(fv[i] - fv[i - j]), c.delta); });
      const double ph = w.integrate(i, [&](std::size_t j) { return std::pow(std::abs(hv[i] - hv[i - j]), c.delta); });
      t3 = c.MN * gap * (pf + ph);
    }
    const double rhs = t1 + t2 + t3;
    rep.worst_slack = std::min(rep.worst_slack, rhs - lhs);
    if (rhs > 0.0 && std::isfinite(rhs)) rep.worst_ratio = std::max(rep.worst_ratio, lhs / rhs);
    if (!within_bound(lhs, rhs)) ++rep.violations;
  }
  return rep;
}

}  // namespace ydde
