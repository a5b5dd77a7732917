#include <atomic>
#include <cmath>

#include "doctest.h"
#include "support.hpp"
#include "ydde/convergence.hpp"
#include "ydde/errors.hpp"

using namespace ydde;
using testing_support::fbm_path;

TEST_SUITE("convergence") {
  TEST_CASE("synthetic power laws") {
    const std::vector<double> r{0.25, 0.125, 0.0625, 0.03125, 0.015625};
    std::vector<double> linear, root;
    for (double x : r) {
      linear.push_back(3 * x);
      root.push_back(0.5 * std::pow(x, 0.4));
    }
    CHECK(fit_log_log(r, linear).slope == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(fit_log_log(r, root).slope == doctest::Approx(0.4).epsilon(1e-6));
    CHECK(fit_log_log(r, root).points == 5);
  }

  TEST_CASE("too few usable points") {
    CHECK_THROWS(fit_log_log({0.5, 0.25, 0.125}, {1, 2, 3}));
    CHECK_THROWS(fit_log_log({0.5, 0.25, 0.125, 0.0625}, {1, 0, 3, 4}));
  }

  TEST_CASE("rate fit over a report uses each seed's row") {
    ConvergenceReport rep;
    rep.delays = {0.25, 0.125, 0.0625, 0.03125};
    rep.dist_alpha.resize(3, 4);
    rep.dist_sup.resize(3, 4);
    for (int s = 0; s < 3; ++s) {
      for (int k = 0; k < 4; ++k) {
        rep.dist_alpha(s, k) = std::pow(rep.delays[k], 0.5 + 0.1 * s);
        rep.dist_sup(s, k) = rep.delays[k];
      }
    }
    const SlopeSummary a = rate_fit(rep, DistanceMetric::alpha_norm);
    CHECK(a.per_seed.size() == 3);
    CHECK(a.median == doctest::Approx(0.6));
    CHECK(rate_fit(rep, DistanceMetric::sup_norm).median == doctest::Approx(1.0));
  }

  TEST_CASE("constant sigma makes every delayed solution equal") {
    const CoefficientSet c = make_preset("additive");
    const Path g = fbm_path(256, 1);
    const auto rep = pathwise_convergence_study(c, make_eta_preset("linear"), g, 0.3, {0.25, 0.125, 0.0});
    CHECK(rep.dist_alpha.maxCoeff() <= 1e-12);
    CHECK(rep.dist_sup.maxCoeff() <= 1e-12);
    CHECK(rep.dist_alpha(0, 2) == 0.0);
  }

  TEST_CASE("zero delay column is exactly zero") {
    const CoefficientSet c = make_preset("sine");
    const auto rep = pathwise_convergence_study(c, make_eta_preset("constant"), fbm_path(256, 2), 0.3, {0.125, 0.0});
    CHECK(rep.dist_alpha(0, 0) > 0.0);
    CHECK(rep.dist_alpha(0, 1) == 0.0);
  }

  TEST_CASE("hereditary drifts and misaligned delays are rejected") {
    CHECK_THROWS_AS(pathwise_convergence_study(make_preset("hereditary-sup"), make_eta_preset("constant"),
                                               fbm_path(64, 1), 0.3, {0.25}),
                    ConfigError);
    CHECK_THROWS_AS(
        pathwise_convergence_study(make_preset("sine"), make_eta_preset("constant"), fbm_path(64, 1), 0.3, {0.1}),
        DelayNotAligned);
  }

  TEST_CASE("Monte Carlo study is deterministic and thread independent") {
    StudyConfig cfg;
    cfg.n = 256;
    cfg.n_seeds = 6;
    cfg.delays = {0.25, 0.125, 0.0625, 0.03125};
    const CoefficientSet c = make_preset("sine");
    const auto a = lp_convergence_study(c, make_eta_preset("constant"), cfg);
    cfg.parallelism = 3;
    const auto b = lp_convergence_study(c, make_eta_preset("constant"), cfg);
    CHECK(a.dist_alpha == b.dist_alpha);
    CHECK(a.lp_means == b.lp_means);
    CHECK(a.seeds == b.seeds);
    CHECK(a.seeds[2] == study_seed(cfg.master_seed, 2));
    // Jensen direction and the dominating column.
    for (Eigen::Index k = 0; k < a.lp_means.cols(); ++k) CHECK(a.lp_means(1, k) >= a.lp_means(0, k) * a.lp_means(0, k));
    for (std::size_t s = 0; s < a.dominating.size(); ++s) {
      CHECK(a.dominating[s] == a.dist_alpha.row(static_cast<Eigen::Index>(s)).maxCoeff());
    }
  }

  TEST_CASE("default delays") {
    const auto d = default_delays(1.0);
    REQUIRE(d.size() == 7);
    CHECK(d.front() == 0.25);
    CHECK(d.back() == std::ldexp(1.0, -8));
  }

  TEST_CASE("gates on a synthetic report") {
    ConvergenceReport rep;
    rep.delays = {0.25, 0.125, 0.0625, 0.03125};
    rep.p_list = {1, 2};
    rep.dist_alpha.resize(2, 4);
    for (int s = 0; s < 2; ++s)
      for (int k = 0; k < 4; ++k) rep.dist_alpha(s, k) = rep.delays[k];
    rep.dist_sup = rep.dist_alpha;
    rep.lp_means.resize(2, 4);
    for (int k = 0; k < 4; ++k) {
      rep.lp_means(0, k) = rep.delays[k];
      rep.lp_means(1, k) = rep.delays[k] * rep.delays[k];
    }
    const GateResult g = evaluate_gates(rep, 0.3);
    CHECK(g.endpoint_ok);
    CHECK(g.slope_ok);
    CHECK(g.lp_ok);
    CHECK(g.lp_ratio[0] == doctest::Approx(8.0));
    rep.lp_means(0, 0) = 0.05;
    CHECK_FALSE(evaluate_gates(rep, 0.3).passed());
  }

  TEST_CASE("batch statistics and Fernique record") {
    const BatchStat b = batch_statistic({1, 2, 3, 4}, 0, 4, [](double x) { return x; });
    CHECK(b.mean == doctest::Approx(2.5));
    CHECK(b.stderr_ == doctest::Approx(std::sqrt(5.0 / 3.0 / 4.0)));
    StudyConfig cfg;
    cfg.n = 128;
    cfg.n_seeds = 20;
    const auto st = fernique_statistics(cfg);
    CHECK(st.all_finite);
    CHECK(st.moments.size() == 3);
    CHECK(st.moments[2] >= st.moments[1] * st.moments[1] * (1 - 1e-12));
    CHECK(st.quantiles[0] <= st.quantiles[2]);
    cfg.alpha = 0.2;
    CHECK_THROWS_AS(fernique_statistics(cfg), ConfigError);
  }

  TEST_CASE("parallel_for visits every index once and rethrows") {
    std::vector<std::atomic<int>> hits(50);
    parallel_for(50, 4, [&](std::size_t i) { ++hits[i]; });
    for (auto& h : hits) CHECK(h.load() == 1);
    CHECK_THROWS(parallel_for(10, 3, [](std::size_t i) {
      if (i == 7) throw Error("boom");
    }));
  }
}
