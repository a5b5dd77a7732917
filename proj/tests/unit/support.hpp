#pragma once

#include <cmath>

#include "ydde/fbm.hpp"
#include "ydde/grid.hpp"
#include "ydde/path.hpp"

namespace testing_support {

inline ydde::Path identity_path(std::size_t n, double r = 0.0) {
  return ydde::Path::from_function(ydde::make_grid(1.0, n, r), 1, [](double t) { return t; });
}

inline ydde::Path fbm_path(std::size_t n, std::uint64_t seed, double hurst = 0.75, int m = 1, double r = 0.0) {
  ydde::FbmConfig cfg;
  cfg.hurst = hurst;
  cfg.dim_m = m;
  cfg.seed = seed;
  return ydde::generate_fbm(ydde::make_grid(1.0, n, r), cfg).path;
}

inline double rel_err(double got, double want) { return std::abs(got - want) / std::abs(want); }

}  // namespace testing_support
