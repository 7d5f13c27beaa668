#pragma once
// Generalized kicked rotor: the classical limit of the mean-field kicked
// system. One map step is
//   p'     = p + sum_{n>=1} n K_n(t) sin(n theta)
//   theta' = theta + p'            (wrapped to [0,2pi) for storage)
// with time-dependent kick harmonics K_n(t). Two kick sources:
//   QuantumMeanField - K_n read off a co-evolved quantum state each kick
//     (shared code path with the quantum diagnostics, equal by construction);
//   EnsembleDensity  - K_n from a kernel-density estimate of the trajectory
//     angle marginal (no quantum state involved).
// Sensitivity is tracked three ways at once: finite-difference partner
// trajectories (offset delta_theta0 in theta only), the exact tangent map,
// and Benettin log-stretch accumulation for the Lyapunov exponent. All
// sensitivity statistics live in log space; the squared-sensitivity mean
// C_cl(t) overflows doubles within ~15 kicks otherwise.

#include <cstdint>
#include <vector>

#include "otoclab/config.hpp"
#include "otoclab/propagator.hpp"

namespace otoclab::cls {

struct ClassicalEnsemble {
  std::vector<double> theta, p;                  // theta wrapped to [0,2pi)
  std::vector<double> partner_theta, partner_p;  // finite-difference twins
  std::vector<std::uint8_t> ok;                  // 0 = excluded from averages
  double delta_theta0 = 1e-5;
  int size() const { return static_cast<int>(theta.size()); }
};

// theta ~ Normal(0, 1/(2 sigma)), p ~ Normal(0, hbar^2 sigma / 2): the
// position/momentum variances of the quantum Gaussian packet. Partners start
// at theta + delta_theta0, same p. Trajectory i draws from a counter-based
// stream at index idx0 + i, so disjoint sub-ensembles can be addressed
// directly and sampling is schedule-independent.
ClassicalEnsemble sample_ensemble(double sigma, const core::GridSpec& grid, int size,
                                  std::uint64_t seed, double delta_theta0 = 1e-5,
                                  std::uint64_t idx0 = 0);

// One kick+drift of main and partner trajectories under a common spectrum.
// Non-finite results mark the trajectory as excluded.
ClassicalEnsemble classical_step(const ClassicalEnsemble& e, const prop::KickSpectrum& kicks);

// Exact differential of one map step at (pre-kick) angle theta:
//   dp' = dp + dtheta * sum n^2 K_n cos(n theta);  dtheta' = dtheta + dp'.
void tangent_step(double& dtheta, double& dp, double theta, const prop::KickSpectrum& kicks);

// K_n = (g / (pi M)) sum_i cos(n theta_i) exp(-n^2 h^2 / 2) for n = 1..n_max:
// Fourier coefficients of a Gaussian kernel-density estimate of the angle
// marginal, normalized like the quantum spectrum (K_n = 4 g Y_n).
prop::KickSpectrum spectrum_from_ensemble(const std::vector<double>& theta, double g,
                                          int n_max, double bandwidth);

// Largest harmonic index worth evaluating: beyond it |K_n| <= 1e-14 max|K|.
int effective_harmonics(const prop::KickSpectrum& kicks);

constexpr unsigned kFlagExcluded = 1u;    // some trajectories went non-finite
constexpr unsigned kFlagSaturated = 2u;   // rms partner separation > 0.1 rad:
                                          // finite differences left the linear regime
constexpr unsigned kFlagDegenerate = 4u;  // every |delta p| = 0, ln C_cl = -inf

struct SensitivityRow {
  int t = 0;
  double log_Ccl = 0.0;          // ln mean (delta p / delta theta0)^2, finite differences
  double log_Ccl_tangent = 0.0;  // same statistic from the tangent map (no saturation)
  double lambda = 0.0;           // mean ln|dp(t)/dtheta(0)| / t from the renormalized
                                 // tangent (accumulated log stretches + p component;
                                 // pure stretch when the p component is exactly zero)
  double lambda_fd = 0.0;        // mean ln|delta p / delta theta0| / t, finite differences
  double rms_dtheta = 0.0;       // rms wrapped partner separation in theta
  unsigned flag = 0;
};

struct SensitivitySeries {
  std::vector<SensitivityRow> rows;
  ExperimentConfig config;
  int excluded = 0;              // trajectories dropped by the end of the run
  bool source_exhausted = false;  // co-evolved quantum source hit the basis edge
};

// Shared driver: per kick, obtain the spectrum from the configured source
// (one spectrum per kick, before any trajectory moves), advance main and
// partner trajectories and the tangent vectors, then reduce the row
// statistics deterministically.
SensitivitySeries sensitivity_run(const ExperimentConfig& cfg, int t_max);

// The classical OTOC C_cl(t) = <(delta p(t) / delta theta(0))^2>; log_Ccl is
// the headline column, finite-difference partners by default.
SensitivitySeries classical_otoc(const ExperimentConfig& cfg, int t_max);

// Maximal Lyapunov estimate lambda(t); the tangent/Benettin column is the
// headline, the finite-difference variant rides along for cross-checks.
SensitivitySeries lyapunov(const ExperimentConfig& cfg, int t_max);

struct PortraitFrame {
  int t = 0;
  std::vector<double> theta;  // wrapped
  std::vector<double> p;      // unwrapped
};
// Snapshots of the main trajectories after t kicks, t drawn from `times`
// (deduplicated, ascending; t=0 is the initial ensemble).
std::vector<PortraitFrame> phase_portrait(const ExperimentConfig& cfg,
                                          const std::vector<int>& times);

struct SemiclassicalRow {
  int t = 0;
  double C = 0.0;          // quantum echo OTOC, A = B = p
  double hbar2_Ccl = 0.0;  // hbar^2 exp(log_Ccl) from the classical run
};
struct SemiclassicalSeries {
  std::vector<SemiclassicalRow> rows;
  bool truncated = false;
  int truncated_at = -1;
};
// Quantum C(t) and hbar^2 C_cl(t) on a common time axis with identical
// (hbar, g, sigma); the correspondence window needs hbar << 1.
SemiclassicalSeries semiclassical_compare(const ExperimentConfig& cfg, int t_max);

}  // namespace otoclab::cls
