#include <cmath>

#include "../oracles/oracle_values.hpp"
#include "doctest.h"
#include "support.hpp"
#include "ydde/errors.hpp"
#include "ydde/fbm.hpp"
#include "ydde/random.hpp"

using namespace ydde;

namespace {

// Sample covariance of two nodes over many paths, with its standard error.
struct CovEstimate {
  double mean;
  double se;
};

CovEstimate sample_cov(const FbmGenerator& gen, std::size_t a, std::size_t b, int paths, std::uint64_t master) {
  double s = 0, s2 = 0;
  for (int i = 0; i < paths; ++i) {
    const Path w = gen.sample(derive_seed(master, "cov-test", static_cast<std::size_t>(i)), 1).path;
    const double p = w.at(0, a) * w.at(0, b);
    s += p;
    s2 += p * p;
  }
  const double mean = s / paths;
  const double var = (s2 - paths * mean * mean) / (paths - 1);
  return {mean, std::sqrt(var / paths)};
}

}  // namespace

TEST_SUITE("fbm") {
  TEST_CASE("covariance closed form") {
    CHECK(fbm_covariance(0.5, 1.0, 0.75) == doctest::Approx(oracle::kFbmCovHalfOne).epsilon(1e-15));
    CHECK(fbm_covariance(0.3, 0.3, 0.6) == doctest::Approx(std::pow(0.3, 1.2)));
    CHECK(fbm_covariance(0.0, 0.7, 0.9) == 0.0);
    CHECK(fbm_covariance(0.2, 0.7, 0.5) == doctest::Approx(0.2));
  }

  TEST_CASE("fgn autocovariance matches increments of the covariance") {
    for (double H : {0.5, 0.75, 0.9}) {
      for (std::size_t k : {0u, 1u, 5u}) {
        const double kk = static_cast<double>(k);
        const double direct = fbm_covariance(kk + 1, 1, H) - fbm_covariance(kk, 1, H) -
                              fbm_covariance(kk + 1, 0, H) + fbm_covariance(kk, 0, H);
        CHECK(fgn_autocovariance(k, H) == doctest::Approx(direct));
      }
    }
  }

  TEST_CASE("paths start at zero and are held at zero on the history") {
    const Path w = testing_support::fbm_path(128, 11, 0.75, 2, 0.25);
    CHECK(w.dim() == 2);
    for (std::size_t k = 0; k <= w.grid().origin(); ++k) CHECK(w.at(k).norm() == 0.0);
    CHECK(w.at(w.size() - 1).norm() > 0.0);
  }

  TEST_CASE("same seed, same bytes; different seeds differ") {
    for (auto method : {FbmMethod::exact_cholesky, FbmMethod::circulant_embedding}) {
      FbmConfig cfg;
      cfg.method = method;
      cfg.seed = 42;
      const TimeGrid g = make_grid(1.0, 256, 0.0);
      CHECK(generate_fbm(g, cfg).path == generate_fbm(g, cfg).path);
      FbmConfig other = cfg;
      other.seed = 43;
      CHECK_FALSE(generate_fbm(g, cfg).path == generate_fbm(g, other).path);
    }
  }

  TEST_CASE("components are independent streams") {
    const Path w = testing_support::fbm_path(64, 5, 0.75, 2);
    CHECK_FALSE(w.values().row(0) == w.values().row(1));
  }

  TEST_CASE("circulant embedding is exact for H > 1/2 on these grids") {
    for (double H : {0.6, 0.75, 0.9}) {
      const FbmGenerator gen(make_grid(1.0, 512, 0.0), H, FbmMethod::circulant_embedding);
      CHECK_FALSE(gen.fell_back());
    }
  }

  TEST_CASE("method names") {
    CHECK(parse_fbm_method("exact-cholesky") == FbmMethod::exact_cholesky);
    CHECK(parse_fbm_method("circulant") == FbmMethod::circulant_embedding);
    CHECK(to_string(FbmMethod::circulant_embedding) == "circulant-embedding");
    CHECK_THROWS_AS(parse_fbm_method("spectral"), ConfigError);
  }

  TEST_CASE("H = 1/2 increments are uncorrelated") {
    const TimeGrid g = make_grid(1.0, 16, 0.0);
    const FbmGenerator gen(g, 0.5, FbmMethod::exact_cholesky);
    double s = 0, s2 = 0;
    const int paths = 20000;
    for (int i = 0; i < paths; ++i) {
      const Path w = gen.sample(derive_seed(9, "lag1", static_cast<std::size_t>(i)), 1).path;
      const double p = (w.at(0, 1) - w.at(0, 0)) * (w.at(0, 2) - w.at(0, 1)) * 256.0;
      s += p;
      s2 += p * p;
    }
    const double mean = s / paths;
    const double se = std::sqrt((s2 / paths - mean * mean) / paths);
    CHECK(std::abs(mean) < 3 * se);
  }

  TEST_CASE("sample covariance of W(0.5), W(1) at H = 0.75") {
    for (auto method : {FbmMethod::exact_cholesky, FbmMethod::circulant_embedding}) {
      const FbmGenerator gen(make_grid(1.0, 64, 0.0), 0.75, method);
      for (auto [a, b] : {std::pair{32u, 64u}, std::pair{64u, 64u}, std::pair{32u, 32u}}) {
        const auto est = sample_cov(gen, a, b, 20000, 17);
        const double want = fbm_covariance(a / 64.0, b / 64.0, 0.75);
        CHECK(std::abs(est.mean - want) < 3.5 * est.se);
      }
    }
  }
}
