#include <cmath>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "otoclab/classical.hpp"
#include "otoclab/config.hpp"
#include "otoclab/kernels.hpp"
#include "otoclab/propagator.hpp"
#include "otoclab/state.hpp"

using namespace otoclab;

namespace {

constexpr double kPi = 3.14159265358979323846;

ExperimentConfig classical_cfg(double g, int ensemble, int t_max) {
  ExperimentConfig cfg;
  cfg.g = g;
  cfg.N = 1024;
  cfg.ensemble_size = ensemble;
  cfg.t_max = t_max;
  return cfg;
}

prop::KickSpectrum single_harmonic(double K1) {
  prop::KickSpectrum ks;
  ks.K = {K1};
  ks.Y = {K1};
  return ks;
}

}  // namespace

TEST_CASE("ensemble sampling: widths, partners, counter addressing") {
  const core::GridSpec grid{1024, 0.6};
  const double sigma = 5.0;
  const auto e = cls::sample_ensemble(sigma, grid, 40000, 99);
  REQUIRE(e.size() == 40000);

  double vth = 0.0, vp = 0.0;
  for (int i = 0; i < e.size(); ++i) {
    const double th = kernels::wrap_angle_pm(e.theta[static_cast<std::size_t>(i)]);
    vth += th * th;
    vp += e.p[static_cast<std::size_t>(i)] * e.p[static_cast<std::size_t>(i)];
  }
  vth /= e.size();
  vp /= e.size();
  CHECK(vth == doctest::Approx(1.0 / (2.0 * sigma)).epsilon(0.05));
  CHECK(vp == doctest::Approx(0.6 * 0.6 * sigma / 2.0).epsilon(0.05));

  for (int i = 0; i < e.size(); i += 997) {
    const auto k = static_cast<std::size_t>(i);
    const double off = kernels::wrap_angle_pm(e.partner_theta[k] - e.theta[k]);
    CHECK(std::abs(off - 1e-5) < 1e-14);
    CHECK(e.partner_p[k] == e.p[k]);
    CHECK(e.ok[k] == 1);
  }

  // same seed reproduces bitwise; disjoint index windows tile a larger draw
  const auto e2 = cls::sample_ensemble(sigma, grid, 40000, 99);
  CHECK(e.theta == e2.theta);
  CHECK(e.p == e2.p);
  const auto lo = cls::sample_ensemble(sigma, grid, 100, 7, 1e-5, 0);
  const auto hi = cls::sample_ensemble(sigma, grid, 100, 7, 1e-5, 100);
  const auto full = cls::sample_ensemble(sigma, grid, 200, 7, 1e-5, 0);
  for (std::size_t i = 0; i < 100; ++i) {
    CHECK(full.theta[i] == lo.theta[i]);
    CHECK(full.p[i] == lo.p[i]);
    CHECK(full.theta[i + 100] == hi.theta[i]);
    CHECK(full.p[i + 100] == hi.p[i]);
  }
}

TEST_CASE("single-harmonic map reduces to the standard map") {
  const double K = 0.9;
  const auto ks = single_harmonic(K);

  cls::ClassicalEnsemble e;
  const int m = 200;
  for (int i = 0; i < m; ++i) {
    const auto g = kernels::gauss_pair(17, static_cast<std::uint64_t>(i));
    e.theta.push_back(kernels::wrap_angle(g.z0 * 2.0));
    e.p.push_back(g.z1);
  }
  e.partner_theta = e.theta;
  e.partner_p = e.p;
  e.ok.assign(m, 1);

  const auto stepped = cls::classical_step(e, ks);
  for (int i = 0; i < m; ++i) {
    const auto k = static_cast<std::size_t>(i);
    double th = e.theta[k], p = e.p[k];
    oracle::standard_map_step(th, p, K);
    CHECK(std::abs(stepped.p[k] - p) < 1e-13);
    CHECK(std::abs(kernels::wrap_angle_pm(stepped.theta[k] - th)) < 1e-13);
  }
}

TEST_CASE("per-step Jacobian determinant is exactly one") {
  // columns of J from the unit tangent vectors; the form (1+f')*1 - 1*f'
  // cancels algebraically, so only representation error of f' remains
  const core::GridSpec grid{512, 0.6};
  auto psi = core::make_gaussian_state(1.0, grid);
  const prop::FloquetParams par{1.5, grid};
  for (int t = 0; t < 5; ++t) {
    const auto ks = prop::kick_spectrum(psi, par.g);
    for (double th : {0.0, 0.31, 2.17, 4.9, 6.27}) {
      double a = 1.0, b = 0.0;  // (dtheta, dp) = e_theta
      double c = 0.0, d = 1.0;  // (dtheta, dp) = e_p
      cls::tangent_step(a, b, th, ks);
      cls::tangent_step(c, d, th, ks);
      CHECK(std::abs(a * d - c * b - 1.0) < 1e-12);
    }
    psi = prop::step_forward(psi, par);
  }
}

TEST_CASE("tangent map equals the finite-difference derivative") {
  const auto ks = single_harmonic(1.3);
  const double h = 1e-6;
  for (double th : {0.4, 1.9, 3.3, 5.8}) {
    double dth = 1.0, dp = 0.0;
    cls::tangent_step(dth, dp, th, ks);

    double f1[1], f2[1];
    kernels::force_eval(&th, 1, ks.K.data(), 1, f1);
    const double thh = th + h;
    kernels::force_eval(&thh, 1, ks.K.data(), 1, f2);
    const double fd_dp = (f2[0] - f1[0]) / h;
    CHECK(dp == doctest::Approx(fd_dp).epsilon(1e-4));
    CHECK(dth == doctest::Approx(1.0 + fd_dp).epsilon(1e-4));
  }
}

TEST_CASE("density-estimate spectrum: anchors and trimming") {
  // all mass at theta = 0 gives K_n = (g/pi) exp(-n^2 h^2 / 2)
  const std::vector<double> at_zero(500, 0.0);
  const double g = 1.5, h = 0.05;
  const auto ks = cls::spectrum_from_ensemble(at_zero, g, 16, h);
  REQUIRE(ks.harmonics() == 16);
  for (int n = 1; n <= 16; ++n) {
    const double want = (g / kPi) * std::exp(-0.5 * n * n * h * h);
    CHECK(ks.K[static_cast<std::size_t>(n - 1)] == doctest::Approx(want).epsilon(1e-12));
  }

  // near-uniform angles: every harmonic much smaller than the point-mass case
  std::vector<double> spread(4096);
  for (std::size_t i = 0; i < spread.size(); ++i)
    spread[i] = 2.0 * kPi * static_cast<double>(i) / static_cast<double>(spread.size());
  const auto flat = cls::spectrum_from_ensemble(spread, g, 16, h);
  for (double k : flat.K) CHECK(std::abs(k) < 1e-10);

  CHECK_THROWS_AS(cls::spectrum_from_ensemble({}, g, 16, h), std::invalid_argument);
  CHECK_THROWS_AS(cls::spectrum_from_ensemble(at_zero, g, -1, h), std::invalid_argument);
  CHECK_THROWS_AS(cls::spectrum_from_ensemble(at_zero, g, 16, 0.0), std::invalid_argument);

  prop::KickSpectrum trim;
  trim.K = {1.0, 1e-20, 1e-11, 1e-20};
  CHECK(cls::effective_harmonics(trim) == 3);
  trim.K = {1.0, 1e-20, 1e-16, 1e-20};
  CHECK(cls::effective_harmonics(trim) == 1);
  trim.K = {2e-30, 1e-30};
  CHECK(cls::effective_harmonics(trim) == 2);  // the cut is relative
  trim.K = {0.0, 0.0};
  CHECK(cls::effective_harmonics(trim) == 0);
  trim.K.clear();
  CHECK(cls::effective_harmonics(trim) == 0);
}

TEST_CASE("sensitivity run: route agreement and determinism") {
  const auto cfg = classical_cfg(1.5, 2000, 6);
  const auto s = cls::sensitivity_run(cfg, cfg.t_max);
  REQUIRE(static_cast<int>(s.rows.size()) == 6);
  CHECK(s.excluded == 0);
  CHECK_FALSE(s.source_exhausted);

  for (const auto& r : s.rows) {
    CHECK(std::isfinite(r.log_Ccl));
    CHECK(std::isfinite(r.log_Ccl_tangent));
    if (r.t <= 5) {
      // small-offset regime: the two C_cl routes and the two lambda routes
      // track each other closely
      CHECK(std::abs(r.log_Ccl - r.log_Ccl_tangent) <
            0.1 * std::max(std::abs(r.log_Ccl), 1.0));
      CHECK(std::abs(r.lambda - r.lambda_fd) < 0.1 * std::max(std::abs(r.lambda), 0.05));
    }
  }
  // growth: the late lnC_cl dwarfs the early one
  CHECK(s.rows.back().log_Ccl > s.rows.front().log_Ccl + 5.0);

  const auto s2 = cls::sensitivity_run(cfg, cfg.t_max);
  for (std::size_t i = 0; i < s.rows.size(); ++i) {
    CHECK(s.rows[i].log_Ccl == s2.rows[i].log_Ccl);
    CHECK(s.rows[i].lambda == s2.rows[i].lambda);
  }

  // worker count must not change the statistics
  kernels::set_threads(3);
  const auto s3 = cls::sensitivity_run(cfg, cfg.t_max);
  kernels::set_threads(1);
  for (std::size_t i = 0; i < s.rows.size(); ++i) {
    CHECK(std::abs(s.rows[i].log_Ccl - s3.rows[i].log_Ccl) < 1e-12);
    CHECK(std::abs(s.rows[i].lambda - s3.rows[i].lambda) < 1e-12);
  }
}

TEST_CASE("free map: flat C_cl, zero lambda, degenerate flag") {
  const auto cfg = classical_cfg(0.0, 500, 4);
  const auto s = cls::sensitivity_run(cfg, cfg.t_max);
  REQUIRE(static_cast<int>(s.rows.size()) == 4);
  for (const auto& r : s.rows) {
    CHECK(std::isinf(r.log_Ccl));
    CHECK(r.log_Ccl < 0.0);
    CHECK((r.flag & cls::kFlagDegenerate) != 0);
    CHECK(r.lambda == 0.0);
  }
}

TEST_CASE("ensemble-density source drives growth without a quantum state") {
  auto cfg = classical_cfg(1.5, 2000, 5);
  cfg.kick_source = KickSource::EnsembleDensity;
  const auto s = cls::sensitivity_run(cfg, cfg.t_max);
  REQUIRE(static_cast<int>(s.rows.size()) == 5);
  CHECK_FALSE(s.source_exhausted);
  for (const auto& r : s.rows) CHECK(std::isfinite(r.log_Ccl));
  CHECK(s.rows.back().log_Ccl > s.rows.front().log_Ccl + 3.0);
}

TEST_CASE("estimator stability: disjoint half-ensembles agree") {
  // two halves addressed through the counter offset, driven by the same
  // co-evolved spectra; the log-mean-exp estimator must agree within 10%
  const ExperimentConfig cfg = classical_cfg(1.5, 8000, 6);
  const core::GridSpec grid{cfg.N, cfg.hbar};
  const int half = 4000;
  auto a = cls::sample_ensemble(cfg.sigma, grid, half, cfg.seed, cfg.delta_theta0, 0);
  auto b = cls::sample_ensemble(cfg.sigma, grid, half, cfg.seed, cfg.delta_theta0,
                                static_cast<std::uint64_t>(half));

  auto psi = core::make_gaussian_state(cfg.sigma, grid);
  const prop::FloquetParams par{cfg.g, grid};
  const double ln_d0 = std::log(cfg.delta_theta0);

  auto log_ccl = [&](const cls::ClassicalEnsemble& e) {
    double xmax = -1e300;
    for (int i = 0; i < e.size(); ++i) {
      const auto k = static_cast<std::size_t>(i);
      const double d = std::abs(e.partner_p[k] - e.p[k]);
      if (d > 0.0) xmax = std::max(xmax, 2.0 * (std::log(d) - ln_d0));
    }
    double acc = 0.0;
    for (int i = 0; i < e.size(); ++i) {
      const auto k = static_cast<std::size_t>(i);
      const double d = std::abs(e.partner_p[k] - e.p[k]);
      if (d > 0.0) acc += std::exp(2.0 * (std::log(d) - ln_d0) - xmax);
    }
    return xmax + std::log(acc / e.size());
  };

  for (int t = 1; t <= 6; ++t) {
    const auto ks = prop::kick_spectrum(psi, cfg.g);
    psi = prop::step_forward(psi, par);
    a = cls::classical_step(a, ks);
    b = cls::classical_step(b, ks);
    const double la = log_ccl(a), lb = log_ccl(b);
    CHECK(std::abs(la - lb) < 0.1 * std::max(std::abs(la), 1.0));
  }
}

TEST_CASE("phase portrait: snapshots at requested kicks") {
  auto cfg = classical_cfg(1.5, 1000, 0);
  const auto frames = cls::phase_portrait(cfg, {2, 0, 2});
  REQUIRE(frames.size() == 2);
  CHECK(frames[0].t == 0);
  CHECK(frames[1].t == 2);
  REQUIRE(static_cast<int>(frames[0].theta.size()) == 1000);

  const core::GridSpec grid{cfg.N, cfg.hbar};
  const auto e0 = cls::sample_ensemble(cfg.sigma, grid, 1000, cfg.seed, cfg.delta_theta0);
  CHECK(frames[0].theta == e0.theta);
  CHECK(frames[0].p == e0.p);

  double spread0 = 0.0, spread2 = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const auto k = static_cast<std::size_t>(i);
    spread0 += frames[0].p[k] * frames[0].p[k];
    spread2 += frames[1].p[k] * frames[1].p[k];
    CHECK(frames[1].theta[k] >= 0.0);
    CHECK(frames[1].theta[k] < 2.0 * kPi);
  }
  CHECK(spread2 > spread0);  // the kicks heat the ensemble
}

TEST_CASE("semiclassical pairing keeps both series aligned") {
  ExperimentConfig cfg;
  cfg.hbar = 0.05;
  cfg.g = 0.05;
  cfg.sigma = 10.0;
  cfg.N = 512;
  cfg.ensemble_size = 2000;
  const auto s = cls::semiclassical_compare(cfg, 3);
  REQUIRE(static_cast<int>(s.rows.size()) == 3);
  for (const auto& r : s.rows) {
    CHECK(r.C > 0.0);
    CHECK(r.hbar2_Ccl > 0.0);
    // correspondence regime: same order of magnitude
    CHECK(r.C / r.hbar2_Ccl > 0.1);
    CHECK(r.C / r.hbar2_Ccl < 10.0);
  }
}
