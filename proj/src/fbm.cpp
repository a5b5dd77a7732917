#include "ydde/fbm.hpp"

#include <unsupported/Eigen/FFT>
#include <algorithm>
#include <cmath>
#include <complex>

#include "ydde/random.hpp"

namespace ydde {

namespace {

constexpr double kNegativeEigenRelative = 1e-10;
constexpr double kNegativeMassRelative = 1e-8;

}  // namespace

std::string to_string(FbmMethod m) {
  return m == FbmMethod::exact_cholesky ? "exact-cholesky" : "circulant-embedding";
}

FbmMethod parse_fbm_method(const std::string& name) {
  if (name == "exact-cholesky" || name == "cholesky") return FbmMethod::exact_cholesky;
  if (name == "circulant-embedding" || name == "circulant") return FbmMethod::circulant_embedding;
  throw ConfigError("unknown fbm method '" + name + "' (expected exact-cholesky or circulant-embedding)");
}

double fbm_covariance(double s, double t, double hurst) {
  const double e = 2.0 * hurst;
  return 0.5 * (std::pow(s, e) + std::pow(t, e) - std::pow(std::abs(t - s), e));
}

double fgn_autocovariance(std::size_t k, double hurst) {
  if (k == 0) return 1.0;
  const double e = 2.0 * hurst;
  const double kk = static_cast<double>(k);
  return 0.5 * (std::pow(kk + 1.0, e) - 2.0 * std::pow(kk, e) + std::pow(kk - 1.0, e));
}

FbmGenerator::FbmGenerator(const TimeGrid& grid, double hurst, FbmMethod method)
    : grid_(grid), hurst_(hurst), method_(method) {
  if (!(hurst > 0.0 && hurst < 1.0)) throw ConfigError("Hurst parameter must lie in (0, 1)");
  const std::size_t n = grid.n_main();

  if (method_ == FbmMethod::circulant_embedding) {
    const std::size_t m = 2 * n;
    std::vector<std::complex<double>> row(m), eig;
    for (std::size_t k = 0; k <= n; ++k) row[k] = fgn_autocovariance(k, hurst);
    for (std::size_t k = 1; k < n; ++k) row[m - k] = row[k];
    Eigen::FFT<double> fft;
    fft.fwd(eig, row);

    double top = 0.0, total = 0.0, negative = 0.0;
    for (const auto& z : eig) {
      top = std::max(top, z.real());
      total += std::abs(z.real());
    }
    bool ok = true;
    for (const auto& z : eig) {
      if (z.real() < -kNegativeEigenRelative * top) negative += -z.real();
    }
    if (negative >= kNegativeMassRelative * total) ok = false;

    if (ok) {
      spectrum_sqrt_.resize(m);
      const double md = static_cast<double>(m);
      for (std::size_t k = 0; k < m; ++k) {
        const double lam = std::max(0.0, eig[k].real());
        const bool real_mode = (k == 0 || k == n);
        spectrum_sqrt_[k] = std::sqrt(lam / (real_mode ? md : 2.0 * md));
      }
      return;
    }
    method_ = FbmMethod::exact_cholesky;
    fell_back_ = true;
  }

  Eigen::MatrixXd cov(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      cov(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          fgn_autocovariance(i > j ? i - j : j - i, hurst);
    }
  }
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) throw Error("fGn covariance is not positive definite");
  chol_lower_ = llt.matrixL();
}

Eigen::VectorXd FbmGenerator::unit_noise_cholesky(std::uint64_t key) const {
  const auto n = chol_lower_.rows();
  GaussianStream z(key);
  Eigen::VectorXd e(n);
  for (Eigen::Index i = 0; i < n; ++i) e(i) = z(static_cast<std::uint64_t>(i));
  return chol_lower_.triangularView<Eigen::Lower>() * e;
}

Eigen::VectorXd FbmGenerator::unit_noise_circulant(std::uint64_t key) const {
  const std::size_t n = grid_.n_main();
  const std::size_t m = 2 * n;
  GaussianStream z(key);
  std::vector<std::complex<double>> w(m), out;
  w[0] = spectrum_sqrt_[0] * z(0);
  w[n] = spectrum_sqrt_[n] * z(1);
  for (std::size_t k = 1; k < n; ++k) {
    const std::complex<double> v(z(2 * k), z(2 * k + 1));
    w[k] = spectrum_sqrt_[k] * v;
    w[m - k] = std::conj(w[k]);
  }
  Eigen::FFT<double> fft;
  fft.fwd(out, w);
  Eigen::VectorXd e(static_cast<Eigen::Index>(n));
  for (std::size_t j = 0; j < n; ++j) e(static_cast<Eigen::Index>(j)) = out[j].real();
  return e;
}

FbmSample FbmGenerator::sample(std::uint64_t seed, int dim_m) const {
  if (dim_m < 1) throw ConfigError("fbm needs at least one component");
  const std::size_t n = grid_.n_main();
  const std::size_t origin = grid_.origin();
  const double scale = std::pow(grid_.step(), hurst_);
  Eigen::MatrixXd values = Eigen::MatrixXd::Zero(dim_m, static_cast<Eigen::Index>(grid_.size()));
  for (int c = 0; c < dim_m; ++c) {
    const std::uint64_t key = derive_seed(seed, "fbm-component", static_cast<std::uint64_t>(c));
    const Eigen::VectorXd noise =
        method_ == FbmMethod::exact_cholesky ? unit_noise_cholesky(key) : unit_noise_circulant(key);
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      acc += scale * noise(static_cast<Eigen::Index>(k));
      values(c, static_cast<Eigen::Index>(origin + k + 1)) = acc;
    }
  }
  return FbmSample{Path(grid_, std::move(values)), fell_back_};
}

FbmSample generate_fbm(const TimeGrid& grid, const FbmConfig& cfg) {
  return FbmGenerator(grid, cfg.hurst, cfg.method).sample(cfg.seed, cfg.dim_m);
}

}  // namespace ydde
