#pragma once
// Theory rates and least-squares fitting for growth laws.
//
// The central rate is gamma(x) = ln[1 + (g x / (pi hbar))^2], evaluated at
// the packet norm (gamma0), at the angle second moment (gamma_tilde), and at
// the post-perturbation norm (gamma_tplus). Fitters are ordinary least
// squares on explicitly recorded windows; no weighting, no automatic window
// search. All of them are exact on data drawn from their own model class.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "otoclab/state.hpp"

namespace otoclab::analysis {

double gamma_theory(double g, double hbar, double norm);
double gamma_tilde(double g, double hbar, double ntilde);  // same fold, Ntilde argument

struct TheoryRates {
  double gamma0 = 0.0;
  double gamma_tilde = 0.0;
  double gamma_tplus = 0.0;
};
TheoryRates theory_rates(double g, double hbar, double norm0, double ntilde,
                         double norm_tplus);

// closed window in the x (usually t) coordinate; points with lo <= x <= hi enter
struct FitWindow {
  double lo = 0.0;
  double hi = 0.0;
};

struct FitResult {
  std::map<std::string, double> params;
  std::map<std::string, double> stderrs;  // standard errors, same keys as params
  std::vector<std::vector<double>> covariance;
  double r_squared = 0.0;
  FitWindow window;
  int n_points = 0;
  std::vector<std::string> flags;
  bool has_flag(const std::string& f) const;
};

// y = intercept + slope x. Needs >= 3 windowed points (2 for an exact line is
// degenerate for error estimates, so 3 is the contract).
FitResult fit_linear(const std::vector<double>& x, const std::vector<double>& y,
                     std::optional<FitWindow> window = std::nullopt);

// value = exp(ln_value0 + rate t): linear fit of ln(value) on t. Values must
// be strictly positive. Default window skips the first 2 kicks of the series
// (the pre-asymptotic transient).
FitResult fit_exponential_rate(const std::vector<double>& t, const std::vector<double>& value,
                               std::optional<FitWindow> window = std::nullopt);

// lnC = a + b t + c t^2, default window again skips the first 2 kicks; needs
// >= 5 windowed points. c <= 2 SE(c) gains the "not-super-exponential" flag.
// When gamma is supplied, eta = c/gamma is added; when g and hbar are also
// supplied the linear term is translated under each of the two degenerate
// readings b = alpha*gamma (beta=0) and b = beta*ln(g/pi hbar)^2 (alpha=0) -
// a quadratic in t cannot separate alpha from beta, so both bounds are
// reported and the "alpha-beta-degenerate" flag is set.
FitResult fit_super_exponential(const std::vector<double>& t, const std::vector<double>& lnC,
                                std::optional<FitWindow> window = std::nullopt,
                                std::optional<double> gamma = std::nullopt,
                                std::optional<double> g = std::nullopt,
                                std::optional<double> hbar = std::nullopt);

// |psi(p)|^2 = A |p|^exponent on the tail: slope of ln|psi|^2 vs ln|p|.
// Default window: |p| from the 90th mass percentile up to 95% of the basis
// edge (the outermost modes carry truncation artifacts). Nonpositive tail
// values are rejected; r^2 < 0.97 gains the "model-mismatch" flag.
FitResult fit_power_law(const core::Distribution& dist,
                        std::optional<FitWindow> window = std::nullopt);

// |psi(p)|^2 = A exp(-|p|/xi): slope of ln|psi|^2 vs |p| gives -1/xi.
// Same default window; values below 1e-28 of the peak are dropped as FFT
// round-off floor. A non-decaying tail gains the "divergent" flag.
FitResult fit_localization_length(const core::Distribution& dist,
                                  std::optional<FitWindow> window = std::nullopt);

struct ConvexityReport {
  bool convex = false;                     // every second difference > 0
  std::vector<double> second_differences;  // y[i+1] - 2 y[i] + y[i-1]
};
ConvexityReport convexity_check(const std::vector<double>& y);

}  // namespace otoclab::analysis
