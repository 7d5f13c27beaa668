#include "otoclab/classical.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

#include "otoclab/kernels.hpp"
#include "otoclab/otoc.hpp"
#include "otoclab/state.hpp"

namespace otoclab::cls {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kPi = 3.141592653589793238462643383279502884;

bool finite4(double a, double b, double c, double d) {
  return std::isfinite(a) && std::isfinite(b) && std::isfinite(c) && std::isfinite(d);
}
}  // namespace

ClassicalEnsemble sample_ensemble(double sigma, const core::GridSpec& grid, int size,
                                  std::uint64_t seed, double delta_theta0,
                                  std::uint64_t idx0) {
  if (size < 1) throw std::invalid_argument("sample_ensemble: size must be >= 1");
  if (!(sigma > 0.0) || !std::isfinite(sigma))
    throw std::invalid_argument("sample_ensemble: sigma must be positive and finite");
  grid.validate();

  ClassicalEnsemble e;
  e.delta_theta0 = delta_theta0;
  e.theta.resize(size);
  e.p.resize(size);
  e.partner_theta.resize(size);
  e.partner_p.resize(size);
  e.ok.assign(size, 1);

  const double s_theta = 1.0 / std::sqrt(2.0 * sigma);
  const double s_p = grid.hbar * std::sqrt(sigma / 2.0);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (int i = 0; i < size; ++i) {
    const auto z = kernels::gauss_pair(seed, idx0 + static_cast<std::uint64_t>(i));
    const double th = kernels::wrap_angle(z.z0 * s_theta);
    e.theta[i] = th;
    e.p[i] = z.z1 * s_p;
    e.partner_theta[i] = kernels::wrap_angle(th + delta_theta0);
    e.partner_p[i] = e.p[i];
  }
  return e;
}

int effective_harmonics(const prop::KickSpectrum& kicks) {
  double kmax = 0.0;
  for (double k : kicks.K) kmax = std::max(kmax, std::abs(k));
  if (kmax == 0.0) return 0;
  for (int n = kicks.harmonics(); n >= 1; --n)
    if (std::abs(kicks.K[n - 1]) > 1e-14 * kmax) return n;
  return 0;
}

ClassicalEnsemble classical_step(const ClassicalEnsemble& e, const prop::KickSpectrum& kicks) {
  ClassicalEnsemble out = e;
  const std::size_t m = out.theta.size();
  const int ncut = effective_harmonics(kicks);
  std::vector<double> f_main(m), f_part(m);
  kernels::force_eval(out.theta.data(), m, kicks.K.data(), ncut, f_main.data());
  kernels::force_eval(out.partner_theta.data(), m, kicks.K.data(), ncut, f_part.data());
  kernels::kick_drift(out.theta.data(), out.p.data(), f_main.data(), m);
  kernels::kick_drift(out.partner_theta.data(), out.partner_p.data(), f_part.data(), m);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (long i = 0; i < static_cast<long>(m); ++i)
    if (!finite4(out.theta[i], out.p[i], out.partner_theta[i], out.partner_p[i])) out.ok[i] = 0;
  return out;
}

void tangent_step(double& dtheta, double& dp, double theta, const prop::KickSpectrum& kicks) {
  double f = 0.0, df = 0.0;
  kernels::force_eval(&theta, 1, kicks.K.data(), effective_harmonics(kicks), &f, &df);
  dp += df * dtheta;
  dtheta += dp;
}

prop::KickSpectrum spectrum_from_ensemble(const std::vector<double>& theta, double g,
                                          int n_max, double bandwidth) {
  if (theta.empty()) throw std::invalid_argument("spectrum_from_ensemble: empty ensemble");
  if (n_max < 0) throw std::invalid_argument("spectrum_from_ensemble: n_max must be >= 0");
  if (!(bandwidth > 0.0) || !std::isfinite(bandwidth))
    throw std::invalid_argument("spectrum_from_ensemble: bandwidth must be positive");

  prop::KickSpectrum ks;
  ks.K.assign(n_max, 0.0);
  ks.Y.assign(n_max, 0.0);
  const double inv_m = 1.0 / static_cast<double>(theta.size());
  // each harmonic is owned by one worker and folded over trajectories in
  // index order, so the result never depends on the worker count
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (int n = 1; n <= n_max; ++n) {
    const double w = std::exp(-0.5 * n * n * bandwidth * bandwidth);
    if (w < 1e-18) continue;
    double s = 0.0;
    for (double th : theta) s += std::cos(n * th);
    const double y = w * s * inv_m / (4.0 * kPi);
    ks.Y[n - 1] = y;
    ks.K[n - 1] = 4.0 * g * y;
  }
  return ks;
}

namespace {

// Kick source for one run: either a co-evolved quantum state sampled before
// each kick, or the ensemble's own angle density.
struct SpectrumSource {
  const ExperimentConfig& cfg;
  core::GridSpec grid;
  prop::FloquetParams par;
  core::QuantumState psi;  // used only by QuantumMeanField
  bool exhausted = false;

  explicit SpectrumSource(const ExperimentConfig& c)
      : cfg(c), grid{c.N, c.hbar}, par{c.g, grid} {
    if (cfg.kick_source == KickSource::QuantumMeanField)
      psi = core::make_gaussian_state(cfg.sigma, grid);
  }

  prop::KickSpectrum next(const ClassicalEnsemble& e) {
    if (cfg.kick_source == KickSource::QuantumMeanField) {
      prop::KickSpectrum ks = prop::kick_spectrum(psi, cfg.g);
      if (prop::edge_mass_fraction(psi) > cfg.edge_mass_threshold) exhausted = true;
      psi = prop::step_forward(psi, par);
      return ks;
    }
    return spectrum_from_ensemble(e.theta, cfg.g, grid.N / 2 - 1, cfg.density_bandwidth);
  }
};

}  // namespace

SensitivitySeries sensitivity_run(const ExperimentConfig& cfg, int t_max) {
  if (t_max < 1) throw std::invalid_argument("sensitivity_run: t_max must be >= 1");
  cfg.validate();

  const core::GridSpec grid{cfg.N, cfg.hbar};
  ClassicalEnsemble e =
      sample_ensemble(cfg.sigma, grid, cfg.ensemble_size, cfg.seed, cfg.delta_theta0);
  const std::size_t m = e.theta.size();
  const double ln_d0 = std::log(cfg.delta_theta0);

  // tangent vectors start at (dtheta, dp) = (1, 0): the derivative with
  // respect to theta(0); alpha accumulates the Benettin log stretches
  std::vector<double> dth(m, 1.0), dp(m, 0.0), alpha(m, 0.0);
  std::vector<double> f_main(m), df_main(m), f_part(m), scratch(m);

  SpectrumSource source(cfg);
  SensitivitySeries series;
  series.config = cfg;
  series.rows.reserve(t_max);

  for (int t = 1; t <= t_max; ++t) {
    const prop::KickSpectrum ks = source.next(e);
    const int ncut = effective_harmonics(ks);

    kernels::force_eval(e.theta.data(), m, ks.K.data(), ncut, f_main.data(), df_main.data());
    kernels::force_eval(e.partner_theta.data(), m, ks.K.data(), ncut, f_part.data());
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (long i = 0; i < static_cast<long>(m); ++i) {
      dp[i] += df_main[i] * dth[i];
      dth[i] += dp[i];
      const double r = std::hypot(dth[i], dp[i]);
      if (r > 0.0 && std::isfinite(r)) {
        dth[i] /= r;
        dp[i] /= r;
        alpha[i] += std::log(r);
      }
    }
    kernels::kick_drift(e.theta.data(), e.p.data(), f_main.data(), m);
    kernels::kick_drift(e.partner_theta.data(), e.partner_p.data(), f_part.data(), m);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (long i = 0; i < static_cast<long>(m); ++i)
      if (!finite4(e.theta[i], e.p[i], e.partner_theta[i], e.partner_p[i]) ||
          !std::isfinite(alpha[i]))
        e.ok[i] = 0;

    SensitivityRow row;
    row.t = t;
    std::size_t nok = 0;
    for (std::size_t i = 0; i < m; ++i) nok += e.ok[i];

    // finite-difference log amplitudes x_i = 2 ln|delta p_i / delta theta0|,
    // reduced by log-sum-exp; max() is exact, the sum uses fixed blocks
    double xmax = kNegInf;
    std::size_t n_fd = 0;
    for (std::size_t i = 0; i < m; ++i) {
      if (!e.ok[i]) continue;
      const double d = e.partner_p[i] - e.p[i];
      if (d == 0.0) continue;
      ++n_fd;
      xmax = std::max(xmax, 2.0 * (std::log(std::abs(d)) - ln_d0));
    }
    if (n_fd == 0 || nok == 0) {
      row.log_Ccl = kNegInf;
      row.lambda_fd = 0.0;
      row.flag |= kFlagDegenerate;
    } else {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
      for (long i = 0; i < static_cast<long>(m); ++i) {
        const double d = e.partner_p[i] - e.p[i];
        scratch[i] = (e.ok[i] && d != 0.0)
                         ? std::exp(2.0 * (std::log(std::abs(d)) - ln_d0) - xmax)
                         : 0.0;
      }
      row.log_Ccl = xmax + std::log(kernels::block_sum(scratch.data(), m) /
                                    static_cast<double>(nok));
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
      for (long i = 0; i < static_cast<long>(m); ++i) {
        const double d = e.partner_p[i] - e.p[i];
        scratch[i] = (e.ok[i] && d != 0.0) ? std::log(std::abs(d)) - ln_d0 : 0.0;
      }
      row.lambda_fd = kernels::block_sum(scratch.data(), m) /
                      (static_cast<double>(n_fd) * static_cast<double>(t));
    }

    // tangent route: d p(t)/d theta(0) = exp(alpha_i) * dp_i exactly
    double ymax = kNegInf;
    std::size_t n_tan = 0;
    for (std::size_t i = 0; i < m; ++i) {
      if (!e.ok[i] || dp[i] == 0.0) continue;
      ++n_tan;
      ymax = std::max(ymax, 2.0 * (alpha[i] + std::log(std::abs(dp[i]))));
    }
    if (n_tan == 0 || nok == 0) {
      row.log_Ccl_tangent = kNegInf;
    } else {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
      for (long i = 0; i < static_cast<long>(m); ++i)
        scratch[i] = (e.ok[i] && dp[i] != 0.0)
                         ? std::exp(2.0 * (alpha[i] + std::log(std::abs(dp[i]))) - ymax)
                         : 0.0;
      row.log_Ccl_tangent = ymax + std::log(kernels::block_sum(scratch.data(), m) /
                                            static_cast<double>(nok));
    }

    if (nok > 0) {
      // lambda averages ln|dp(t)/dtheta(0)| = alpha_i + ln|dp_i| per
      // trajectory; when the p component is identically zero (pure shear,
      // K=0) the stretch alpha_i alone applies, so the free map gives 0
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
      for (long i = 0; i < static_cast<long>(m); ++i) {
        const double lp = (dp[i] != 0.0) ? std::log(std::abs(dp[i])) : 0.0;
        scratch[i] = e.ok[i] ? alpha[i] + lp : 0.0;
      }
      row.lambda = kernels::block_sum(scratch.data(), m) /
                   (static_cast<double>(nok) * static_cast<double>(t));
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
      for (long i = 0; i < static_cast<long>(m); ++i) {
        const double d = kernels::wrap_angle_pm(e.partner_theta[i] - e.theta[i]);
        scratch[i] = e.ok[i] ? d * d : 0.0;
      }
      row.rms_dtheta =
          std::sqrt(kernels::block_sum(scratch.data(), m) / static_cast<double>(nok));
    }

    series.excluded = static_cast<int>(m - nok);
    if (series.excluded > 0) row.flag |= kFlagExcluded;
    if (row.rms_dtheta > 0.1) row.flag |= kFlagSaturated;
    series.rows.push_back(row);
  }
  series.source_exhausted = source.exhausted;
  return series;
}

SensitivitySeries classical_otoc(const ExperimentConfig& cfg, int t_max) {
  return sensitivity_run(cfg, t_max);
}

SensitivitySeries lyapunov(const ExperimentConfig& cfg, int t_max) {
  return sensitivity_run(cfg, t_max);
}

std::vector<PortraitFrame> phase_portrait(const ExperimentConfig& cfg,
                                          const std::vector<int>& times) {
  // the snapshot list carries the horizon; the config's run horizons are not
  // consulted, so do not let them veto an otherwise valid portrait request
  ExperimentConfig checked = cfg;
  checked.t_max = std::max(1, cfg.t_max);
  checked.t_star = std::max(1, cfg.t_star);
  checked.validate();
  if (times.empty()) throw std::invalid_argument("phase_portrait: no snapshot times");
  std::vector<int> want = times;
  std::sort(want.begin(), want.end());
  want.erase(std::unique(want.begin(), want.end()), want.end());
  if (want.front() < 0) throw std::invalid_argument("phase_portrait: times must be >= 0");

  const core::GridSpec grid{cfg.N, cfg.hbar};
  ClassicalEnsemble e =
      sample_ensemble(cfg.sigma, grid, cfg.ensemble_size, cfg.seed, cfg.delta_theta0);
  const std::size_t m = e.theta.size();
  std::vector<double> f(m);

  SpectrumSource source(cfg);
  std::vector<PortraitFrame> frames;
  std::size_t next = 0;
  for (int t = 0; t <= want.back(); ++t) {
    if (t == want[next]) {
      frames.push_back({t, e.theta, e.p});
      if (++next == want.size()) break;
    }
    const prop::KickSpectrum ks = source.next(e);
    kernels::force_eval(e.theta.data(), m, ks.K.data(), effective_harmonics(ks), f.data());
    kernels::kick_drift(e.theta.data(), e.p.data(), f.data(), m);
  }
  return frames;
}

SemiclassicalSeries semiclassical_compare(const ExperimentConfig& cfg, int t_max) {
  const otoc::OtocSeries q =
      otoc::otoc(cfg, otoc::PerturbationKind::MomentumOp, otoc::PerturbationKind::MomentumOp,
                 t_max);
  const SensitivitySeries c = sensitivity_run(cfg, t_max);

  SemiclassicalSeries out;
  out.truncated = q.truncated;
  out.truncated_at = q.truncated_at;
  for (std::size_t k = 0; k < q.records.size(); ++k) {
    SemiclassicalRow row;
    row.t = q.records[k].t;
    row.C = q.records[k].C;
    row.hbar2_Ccl = cfg.hbar * cfg.hbar * std::exp(c.rows[k].log_Ccl);
    out.rows.push_back(row);
  }
  return out;
}

}  // namespace otoclab::cls
