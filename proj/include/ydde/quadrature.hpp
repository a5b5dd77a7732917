#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

namespace ydde {

/// Product-integration weights for the kernel u^{-p} on a uniform lag grid.
///
/// On the cell u in [j h, (j+1) h] an integrand phi is interpolated linearly
/// between phi_j and phi_{j+1}, and the kernel is integrated exactly:
///
///   lower(j) = int (1 - theta) u^{-p} du,   upper(j) = int theta u^{-p} du,
///
/// with theta = (u - j h) / h. For p >= 1 the lag-0 lower weight is infinite;
/// every integrand used with such kernels vanishes at lag 0, so that term is
/// skipped.
template <typename Scalar>
class KernelWeights {
 public:
  KernelWeights(Scalar p, Scalar h, std::size_t max_lag) : p_(p), h_(h) {
    lower_.resize(max_lag + 1);
    upper_.resize(max_lag + 1);
    const Scalar scale = std::pow(h, Scalar(1) - p);
    for (std::size_t j = 0; j <= max_lag; ++j) {
      const Scalar i0 = unit_integral(-p, j);
      const Scalar i1 = unit_integral(Scalar(1) - p, j);
      const Scalar up = j == 0 ? i1 : i1 - static_cast<Scalar>(j) * i0;
      upper_[j] = scale * up;
      lower_[j] = std::isfinite(i0) ? scale * (i0 - up) : Scalar(0);
    }
    if (!std::isfinite(unit_integral(-p, 0))) singular_ = true;
  }

  Scalar exponent() const { return p_; }
  Scalar step() const { return h_; }
  bool singular_at_zero() const { return singular_; }
  std::size_t max_lag() const { return lower_.size() - 1; }

  Scalar lower(std::size_t j) const { return lower_[j]; }
  Scalar upper(std::size_t j) const { return upper_[j]; }

  /// Weight of phi_j in an integral over lags [0, m].
  Scalar weight(std::size_t j, std::size_t m) const {
    Scalar w = 0;
    if (j < m) w += lower_[j];
    if (j > 0) w += upper_[j - 1];
    return w;
  }

  /// Integral over lags [0, m]; phi(j) is the integrand at lag j.
  template <typename Phi>
  Scalar integrate(std::size_t m, Phi&& phi) const {
    Scalar acc = 0;
    if (m == 0) return acc;
    if (!singular_) acc += lower_[0] * phi(std::size_t{0});
    for (std::size_t j = 1; j < m; ++j) acc += (lower_[j] + upper_[j - 1]) * phi(j);
    acc += upper_[m - 1] * phi(m);
    return acc;
  }

  /// Contribution of cell [m-1, m] given phi at both ends.
  Scalar cell(std::size_t m, Scalar phi_lo, Scalar phi_hi) const {
    const std::size_t j = m - 1;
    Scalar acc = upper_[j] * phi_hi;
    if (j > 0 || !singular_) acc += lower_[j] * phi_lo;
    return acc;
  }

 private:
  // int_j^{j+1} v^q dv, written to avoid cancellation for large j.
  static Scalar unit_integral(Scalar q, std::size_t j) {
    const Scalar e = q + Scalar(1);
    if (j == 0) return e > 0 ? Scalar(1) / e : std::numeric_limits<Scalar>::infinity();
    const Scalar jj = static_cast<Scalar>(j);
    const Scalar l = std::log1p(Scalar(1) / jj);
    if (std::abs(e) < Scalar(1e-12)) return l;
    return std::pow(jj, e) * std::expm1(e * l) / e;
  }

  Scalar p_;
  Scalar h_;
  bool singular_ = false;
  std::vector<Scalar> lower_;
  std::vector<Scalar> upper_;
};

/// Cumulative trapezoid of equally spaced samples.
template <typename Scalar>
std::vector<Scalar> cumulative_trapezoid(const std::vector<Scalar>& y, Scalar h) {
  std::vector<Scalar> out(y.size(), Scalar(0));
  for (std::size_t k = 1; k < y.size(); ++k) out[k] = out[k - 1] + Scalar(0.5) * h * (y[k - 1] + y[k]);
  return out;
}

}  // namespace ydde
