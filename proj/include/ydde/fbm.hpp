#pragma once

#include <Eigen/Core>
#include <Eigen/Cholesky>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ydde/path.hpp"

namespace ydde {

enum class FbmMethod { exact_cholesky, circulant_embedding };

std::string to_string(FbmMethod m);
FbmMethod parse_fbm_method(const std::string& name);

struct FbmConfig {
  double hurst = 0.75;
  int dim_m = 1;
  std::uint64_t seed = 0;
  FbmMethod method = FbmMethod::circulant_embedding;
};

/// E[W(s) W(t)] = (s^{2H} + t^{2H} - |t-s|^{2H}) / 2.
double fbm_covariance(double s, double t, double hurst);

/// Autocovariance of unit-step fractional Gaussian noise at lag k.
double fgn_autocovariance(std::size_t k, double hurst);

struct FbmSample {
  Path path;
  /// Set when circulant embedding had to give way to Cholesky.
  bool fell_back_to_cholesky = false;
};

/// Reusable sampler for one (grid, H, method): the Cholesky factor or the
/// circulant spectrum is computed once and shared by every sample() call.
/// sample() is const and safe to call concurrently.
class FbmGenerator {
 public:
  FbmGenerator(const TimeGrid& grid, double hurst, FbmMethod method);

  /// Components are keyed by (seed, component); W(0) = 0 and the path is
  /// held at 0 on the history part of the grid.
  FbmSample sample(std::uint64_t seed, int dim_m) const;

  FbmMethod method() const { return method_; }
  bool fell_back() const { return fell_back_; }
  const TimeGrid& grid() const { return grid_; }

 private:
  Eigen::VectorXd unit_noise_cholesky(std::uint64_t key) const;
  Eigen::VectorXd unit_noise_circulant(std::uint64_t key) const;

  TimeGrid grid_;
  double hurst_;
  FbmMethod method_;
  bool fell_back_ = false;
  Eigen::MatrixXd chol_lower_;
  std::vector<double> spectrum_sqrt_;
};

FbmSample generate_fbm(const TimeGrid& grid, const FbmConfig& cfg);

}  // namespace ydde
