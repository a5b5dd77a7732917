#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <vector>

#include "ydde/path.hpp"
#include "ydde/quadrature.hpp"

// Fractional Sobolev and Hoelder norms of sample paths, the Weyl derivative
// and the driver functional Lambda_alpha. Suprema over continuous time are
// taken over grid nodes; singular integrals use KernelWeights on the
// piecewise-linear interpolant.

namespace ydde {

template <typename Scalar>
struct NormReport {
  Scalar alpha = 0;
  Scalar lambda = 1;
  Scalar norm_alpha_infty = 0;
  Scalar norm_holder_1ma = 0;
  Scalar norm_alpha_lambda = 0;
  Scalar lambda_alpha_of_driver = 0;
  Scalar delta_r = 0;
  Scalar norm_1ma_infty_T = 0;
  Scalar norm_alpha_1 = 0;
};

namespace detail {

template <typename Values>
auto node_distance(const Values& v, Eigen::Index i, Eigen::Index k) {
  if (v.rows() == 1) return std::abs(v(0, i) - v(0, k));
  return (v.col(i) - v.col(k)).norm();
}

/// profile[i] = int_{t_0}^{t_i} |f(t_i) - f(s)|^power (t_i - s)^{-alpha-1} ds for every column i.
template <typename Values, typename Scalar = typename Values::Scalar>
std::vector<Scalar> singular_profile(const Values& v, Scalar h, Scalar alpha, Scalar power = 1) {
  const auto n = static_cast<std::size_t>(v.cols());
  KernelWeights<Scalar> w(alpha + 1, h, n);
  std::vector<Scalar> out(n, Scalar(0));
  for (std::size_t i = 1; i < n; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    out[i] = w.integrate(i, [&](std::size_t j) {
      const Scalar d = node_distance(v, ii, ii - static_cast<Eigen::Index>(j));
      return power == Scalar(1) ? d : std::pow(d, power);
    });
  }
  return out;
}

template <typename Scalar>
const SamplePath<Scalar> on_interval(const SamplePath<Scalar>& f, double r) {
  if (f.grid().steps_for(r) > f.grid().n_history()) {
    throw Error("path is not defined on the requested interval [-r, T]");
  }
  return f.restrict_history(r);
}

}  // namespace detail

/// sup_t ( |f(t)| + int_{-r}^t |f(t)-f(s)| (t-s)^{-alpha-1} ds ).
template <typename Scalar>
Scalar norm_alpha_infty(const SamplePath<Scalar>& f, Scalar alpha, double r = 0.0) {
  const auto g = detail::on_interval(f, r);
  const auto prof = detail::singular_profile(g.values(), static_cast<Scalar>(g.grid().step()), alpha);
  Scalar best = 0;
  for (std::size_t i = 0; i < prof.size(); ++i) best = std::max(best, g.at(i).norm() + prof[i]);
  return best;
}

/// The same norm over [-r, 0] only.
template <typename Scalar>
Scalar norm_alpha_infty(const InitialSegment<Scalar>& eta, Scalar alpha) {
  const auto& v = eta.history_values();
  const auto prof = detail::singular_profile(v, static_cast<Scalar>(eta.grid().step()), alpha);
  Scalar best = 0;
  for (std::size_t i = 0; i < prof.size(); ++i) {
    best = std::max(best, v.col(static_cast<Eigen::Index>(i)).norm() + prof[i]);
  }
  return best;
}

/// sup_t e^{-lambda t} ( |f(t)| + singular integral ); equivalent to norm_alpha_infty.
template <typename Scalar>
Scalar norm_alpha_lambda(const SamplePath<Scalar>& f, Scalar alpha, Scalar lambda, double r = 0.0) {
  const auto g = detail::on_interval(f, r);
  const auto prof = detail::singular_profile(g.values(), static_cast<Scalar>(g.grid().step()), alpha);
  Scalar best = 0;
  for (std::size_t i = 0; i < prof.size(); ++i) {
    const Scalar weight = std::exp(-lambda * static_cast<Scalar>(g.time(i)));
    best = std::max(best, weight * (g.at(i).norm() + prof[i]));
  }
  return best;
}

namespace detail {

template <typename Values, typename Scalar = typename Values::Scalar>
Scalar holder_of_values(const Values& v, Scalar h, Scalar mu) {
  const auto n = v.cols();
  std::vector<Scalar> inv(static_cast<std::size_t>(n));
  for (Eigen::Index j = 1; j < n; ++j) inv[static_cast<std::size_t>(j)] = std::pow(static_cast<Scalar>(j) * h, -mu);
  Scalar seminorm = 0;
  for (Eigen::Index t = 1; t < n; ++t) {
    for (Eigen::Index s = 0; s < t; ++s) {
      seminorm = std::max(seminorm, node_distance(v, t, s) * inv[static_cast<std::size_t>(t - s)]);
    }
  }
  return v.colwise().norm().maxCoeff() + seminorm;
}

}  // namespace detail

/// ||f||_{inf(r)} + max_{s<t} |f(t)-f(s)| / (t-s)^mu over [-r, T].
template <typename Scalar>
Scalar norm_holder(const SamplePath<Scalar>& f, Scalar mu, double r = 0.0) {
  const auto g = detail::on_interval(f, r);
  return detail::holder_of_values(g.values(), static_cast<Scalar>(g.grid().step()), mu);
}

template <typename Scalar>
Scalar norm_holder(const InitialSegment<Scalar>& eta, Scalar mu) {
  return detail::holder_of_values(eta.history_values(), static_cast<Scalar>(eta.grid().step()), mu);
}

/// Right-sided Weyl derivative of order 1-alpha of g_{t-} at s, for a scalar path
/// and node indices s < t:
///
///   (1/Gamma(alpha)) [ (g(s)-g(t)) / (t-s)^{1-alpha}
///                      + (1-alpha) int_s^t (g(s)-g(u)) / (u-s)^{2-alpha} du ].
///
/// The phase factor (-1)^{1-alpha} is dropped.
template <typename Scalar>
Scalar weyl_derivative(const SamplePath<Scalar>& g, Scalar alpha, std::size_t s, std::size_t t) {
  if (s >= t) throw Error("weyl_derivative needs s < t");
  if (t >= g.size()) throw Error("weyl_derivative node out of range");
  const Scalar h = static_cast<Scalar>(g.grid().step());
  const std::size_t m = t - s;
  KernelWeights<Scalar> w(Scalar(2) - alpha, h, m);
  const Scalar gs = g.at(0, s);
  const Scalar integral = w.integrate(m, [&](std::size_t j) { return gs - g.at(0, s + j); });
  const Scalar bracket = (gs - g.at(0, t)) * std::pow(static_cast<Scalar>(m) * h, alpha - Scalar(1)) +
                         (Scalar(1) - alpha) * integral;
  return bracket / std::tgamma(alpha);
}

namespace detail {

// Visits every node pair s < t of one scalar row, passing the pair's
// increment (g(t)-g(s)), the signed kernel integral int_s^t (g(s)-g(u)) (u-s)^{alpha-2} du
// and the unsigned one with |g(u)-g(s)|.
template <typename Row, typename Scalar, typename Visit>
void visit_weyl_pairs(const Row& row, Scalar h, Scalar alpha, Visit&& visit) {
  const auto n = static_cast<std::size_t>(row.size());
  KernelWeights<Scalar> w(Scalar(2) - alpha, h, n);
  std::vector<Scalar> edge(n);
  for (std::size_t m = 1; m < n; ++m) edge[m] = std::pow(static_cast<Scalar>(m) * h, alpha - Scalar(1));
  for (std::size_t s = 0; s + 1 < n; ++s) {
    const Scalar gs = row(static_cast<Eigen::Index>(s));
    Scalar signed_acc = 0;
    Scalar abs_acc = 0;
    Scalar prev = 0;
    for (std::size_t t = s + 1; t < n; ++t) {
      const std::size_t m = t - s;
      const Scalar cur = gs - row(static_cast<Eigen::Index>(t));
      signed_acc += w.cell(m, prev, cur);
      abs_acc += w.cell(m, std::abs(prev), std::abs(cur));
      prev = cur;
      visit(s, t, -cur, edge[m], signed_acc, abs_acc);
    }
  }
}

}  // namespace detail

/// Lambda_alpha(g) = sup_{s<t} |D^{1-alpha}_{t-} g_{t-}(s)| / Gamma(1-alpha), maximised over
/// the components of g. Only the [0, T] part of g is used.
template <typename Scalar>
Scalar lambda_alpha(const SamplePath<Scalar>& g, Scalar alpha) {
  const auto main = g.main_segment();
  const Scalar h = static_cast<Scalar>(main.grid().step());
  Scalar best = 0;
  for (Eigen::Index c = 0; c < main.dim(); ++c) {
    const auto row = main.values().row(c);
    detail::visit_weyl_pairs(row, h, alpha,
                             [&](std::size_t, std::size_t, Scalar inc, Scalar edge, Scalar signed_acc, Scalar) {
                               const Scalar bracket = -inc * edge + (Scalar(1) - alpha) * signed_acc;
                               best = std::max(best, std::abs(bracket));
                             });
  }
  return best / (std::tgamma(alpha) * std::tgamma(Scalar(1) - alpha));
}

/// sup_{s<t} ( |g(t)-g(s)| / (t-s)^{1-alpha} + int_s^t |g(u)-g(s)| / (u-s)^{2-alpha} du ) on [0, T],
/// maximised over components.
template <typename Scalar>
Scalar norm_1ma_infty_T(const SamplePath<Scalar>& g, Scalar alpha) {
  const auto main = g.main_segment();
  const Scalar h = static_cast<Scalar>(main.grid().step());
  Scalar best = 0;
  for (Eigen::Index c = 0; c < main.dim(); ++c) {
    const auto row = main.values().row(c);
    detail::visit_weyl_pairs(row, h, alpha,
                             [&](std::size_t, std::size_t, Scalar inc, Scalar edge, Scalar, Scalar abs_acc) {
                               best = std::max(best, std::abs(inc) * edge + abs_acc);
                             });
  }
  return best;
}

/// int_0^T |f(s)| s^{-alpha} ds + int_0^T int_0^s |f(s)-f(u)| (s-u)^{-alpha-1} du ds.
template <typename Scalar>
Scalar norm_alpha_1(const SamplePath<Scalar>& f, Scalar alpha) {
  const auto main = f.main_segment();
  const auto& v = main.values();
  const Scalar h = static_cast<Scalar>(main.grid().step());
  const std::size_t n = main.size() - 1;
  KernelWeights<Scalar> w(alpha, h, n);
  const Scalar first = w.integrate(n, [&](std::size_t j) { return v.col(static_cast<Eigen::Index>(j)).norm(); });
  const auto inner = detail::singular_profile(v, h, alpha);
  return first + cumulative_trapezoid(inner, h).back();
}

/// Delta_r(f) = sup_u int_{-r}^u |f(u)-f(s)|^delta (u-s)^{-alpha-1} ds.
template <typename Scalar>
Scalar delta_r(const SamplePath<Scalar>& f, Scalar alpha, Scalar delta, double r = 0.0) {
  const auto g = detail::on_interval(f, r);
  const auto prof = detail::singular_profile(g.values(), static_cast<Scalar>(g.grid().step()), alpha, delta);
  return *std::max_element(prof.begin(), prof.end());
}

/// All norms of a path x on [-r, T] together with the driver functionals of g.
template <typename Scalar>
NormReport<Scalar> norm_report(const SamplePath<Scalar>& x, const SamplePath<Scalar>& g, Scalar alpha,
                               Scalar lambda, Scalar delta, double r) {
  NormReport<Scalar> rep;
  rep.alpha = alpha;
  rep.lambda = lambda;
  rep.norm_alpha_infty = norm_alpha_infty(x, alpha, r);
  rep.norm_holder_1ma = norm_holder(x, Scalar(1) - alpha, r);
  rep.norm_alpha_lambda = norm_alpha_lambda(x, alpha, lambda, r);
  rep.lambda_alpha_of_driver = lambda_alpha(g, alpha);
  rep.delta_r = delta_r(x, alpha, delta, r);
  rep.norm_1ma_infty_T = norm_1ma_infty_T(g, alpha);
  rep.norm_alpha_1 = norm_alpha_1(x, alpha);
  return rep;
}

}  // namespace ydde
