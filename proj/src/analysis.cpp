#include "otoclab/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace otoclab::analysis {

namespace {
constexpr double kPi = std::numbers::pi;

double rate_fold(double g, double hbar, double x) {
  if (!(hbar > 0.0) || !std::isfinite(hbar))
    throw std::invalid_argument("gamma rate: hbar must be positive and finite");
  if (!std::isfinite(g) || !std::isfinite(x))
    throw std::invalid_argument("gamma rate: arguments must be finite");
  if (x < 0.0) throw std::invalid_argument("gamma rate: norm argument must be >= 0");
  const double r = g * x / (kPi * hbar);
  return std::log1p(r * r);
}
}  // namespace

double gamma_theory(double g, double hbar, double norm) { return rate_fold(g, hbar, norm); }
double gamma_tilde(double g, double hbar, double ntilde) { return rate_fold(g, hbar, ntilde); }

TheoryRates theory_rates(double g, double hbar, double norm0, double ntilde,
                         double norm_tplus) {
  return {rate_fold(g, hbar, norm0), rate_fold(g, hbar, ntilde), rate_fold(g, hbar, norm_tplus)};
}

bool FitResult::has_flag(const std::string& f) const {
  return std::find(flags.begin(), flags.end(), f) != flags.end();
}

namespace {

struct Ols {
  std::vector<double> beta, se;
  std::vector<std::vector<double>> cov;
  double r2 = 0.0;
  int n = 0;
};

// Solve A x = b for several right-hand sides, Gaussian elimination with
// partial pivoting; A is k x k with k <= 3.
void solve_inplace(std::vector<std::vector<double>>& a, std::vector<std::vector<double>>& rhs) {
  const int k = static_cast<int>(a.size());
  double scale = 0.0;
  for (int i = 0; i < k; ++i) scale = std::max(scale, std::abs(a[i][i]));
  for (int col = 0; col < k; ++col) {
    int piv = col;
    for (int r = col + 1; r < k; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    if (std::abs(a[piv][col]) < 1e-12 * scale || a[piv][col] == 0.0)
      throw std::invalid_argument("least squares: degenerate design matrix");
    std::swap(a[piv], a[col]);
    std::swap(rhs[piv], rhs[col]);
    for (int r = 0; r < k; ++r) {
      if (r == col) continue;
      const double f = a[r][col] / a[col][col];
      for (int c = col; c < k; ++c) a[r][c] -= f * a[col][c];
      for (std::size_t c = 0; c < rhs[r].size(); ++c) rhs[r][c] -= f * rhs[col][c];
    }
  }
  for (int r = 0; r < k; ++r)
    for (std::size_t c = 0; c < rhs[r].size(); ++c) rhs[r][c] /= a[r][r];
}

// Polynomial least squares y = sum_j beta_j x^j. The fit runs in centered
// coordinates u = x - xbar (the raw normal equations lose ~6 digits for t up
// to ~20) and the coefficients and covariance are shifted back.
Ols ols_poly(const std::vector<double>& x, const std::vector<double>& y, int degree) {
  const int n = static_cast<int>(x.size());
  const int k = degree + 1;
  double xbar = 0.0;
  for (double v : x) xbar += v;
  xbar /= n;

  std::vector<std::vector<double>> ata(k, std::vector<double>(k, 0.0));
  std::vector<std::vector<double>> rhs(k, std::vector<double>(1 + k, 0.0));  // [X'y | I]
  for (int i = 0; i < n; ++i) {
    double pw[3] = {1.0, 0.0, 0.0};
    const double u = x[i] - xbar;
    for (int j = 1; j < k; ++j) pw[j] = pw[j - 1] * u;
    for (int r = 0; r < k; ++r) {
      for (int c = 0; c < k; ++c) ata[r][c] += pw[r] * pw[c];
      rhs[r][0] += pw[r] * y[i];
    }
  }
  for (int r = 0; r < k; ++r) rhs[r][1 + r] = 1.0;
  solve_inplace(ata, rhs);

  std::vector<double> beta_c(k);
  std::vector<std::vector<double>> inv(k, std::vector<double>(k));
  for (int r = 0; r < k; ++r) {
    beta_c[r] = rhs[r][0];
    for (int c = 0; c < k; ++c) inv[r][c] = rhs[r][1 + c];
  }

  double ssr = 0.0, sst = 0.0, ybar = 0.0;
  for (int i = 0; i < n; ++i) ybar += y[i];
  ybar /= n;
  for (int i = 0; i < n; ++i) {
    const double u = x[i] - xbar;
    double fit = beta_c[0];
    double p = 1.0;
    for (int j = 1; j < k; ++j) {
      p *= u;
      fit += beta_c[j] * p;
    }
    ssr += (y[i] - fit) * (y[i] - fit);
    sst += (y[i] - ybar) * (y[i] - ybar);
  }
  const double sigma2 = n > k ? ssr / (n - k) : 0.0;

  // shift back: with T mapping centered to raw coefficients,
  // beta = T beta_c and cov = sigma^2 T inv T'
  std::vector<std::vector<double>> T(k, std::vector<double>(k, 0.0));
  if (k == 1) {
    T[0][0] = 1.0;
  } else if (k == 2) {
    T[0][0] = 1.0;
    T[0][1] = -xbar;
    T[1][1] = 1.0;
  } else {
    T[0][0] = 1.0;
    T[0][1] = -xbar;
    T[0][2] = xbar * xbar;
    T[1][1] = 1.0;
    T[1][2] = -2.0 * xbar;
    T[2][2] = 1.0;
  }

  Ols out;
  out.n = n;
  out.beta.assign(k, 0.0);
  out.cov.assign(k, std::vector<double>(k, 0.0));
  for (int r = 0; r < k; ++r)
    for (int c = 0; c < k; ++c) out.beta[r] += T[r][c] * beta_c[c];
  for (int r = 0; r < k; ++r)
    for (int c = 0; c < k; ++c) {
      double s = 0.0;
      for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) s += T[r][i] * inv[i][j] * T[c][j];
      out.cov[r][c] = sigma2 * s;
    }
  out.se.assign(k, 0.0);
  for (int r = 0; r < k; ++r) out.se[r] = std::sqrt(std::max(0.0, out.cov[r][r]));
  out.r2 = sst > 0.0 ? std::max(0.0, 1.0 - ssr / sst) : 1.0;
  return out;
}

struct Windowed {
  std::vector<double> x, y;
};

Windowed apply_window(const std::vector<double>& x, const std::vector<double>& y,
                      const FitWindow& w) {
  if (x.size() != y.size())
    throw std::invalid_argument("fit: x and y lengths differ");
  Windowed out;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] >= w.lo && x[i] <= w.hi) {
      out.x.push_back(x[i]);
      out.y.push_back(y[i]);
    }
  return out;
}

FitWindow full_window(const std::vector<double>& x) {
  if (x.empty()) throw std::invalid_argument("fit: empty series");
  auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  return {*lo, *hi};
}

// default for kick series: drop the first 2 kicks (early-time transient)
FitWindow kick_window(const std::vector<double>& x) {
  FitWindow w = full_window(x);
  w.lo += 2.0;
  return w;
}

void require_points(const Windowed& w, std::size_t k, const char* who) {
  if (w.x.size() < k) {
    std::ostringstream os;
    os << who << ": need >= " << k << " points in window (got " << w.x.size() << ")";
    throw std::invalid_argument(os.str());
  }
}

}  // namespace

FitResult fit_linear(const std::vector<double>& x, const std::vector<double>& y,
                     std::optional<FitWindow> window) {
  const FitWindow w = window.value_or(full_window(x));
  const Windowed d = apply_window(x, y, w);
  require_points(d, 3, "fit_linear");
  const Ols o = ols_poly(d.x, d.y, 1);
  FitResult r;
  r.params = {{"intercept", o.beta[0]}, {"slope", o.beta[1]}};
  r.stderrs = {{"intercept", o.se[0]}, {"slope", o.se[1]}};
  r.covariance = o.cov;
  r.r_squared = o.r2;
  r.window = w;
  r.n_points = o.n;
  return r;
}

FitResult fit_exponential_rate(const std::vector<double>& t, const std::vector<double>& value,
                               std::optional<FitWindow> window) {
  const FitWindow w = window.value_or(kick_window(t));
  const Windowed d = apply_window(t, value, w);
  require_points(d, 3, "fit_exponential_rate");
  std::vector<double> ln(d.y.size());
  for (std::size_t i = 0; i < d.y.size(); ++i) {
    if (!(d.y[i] > 0.0)) {
      std::ostringstream os;
      os << "fit_exponential_rate: nonpositive value " << d.y[i] << " at t=" << d.x[i];
      throw std::invalid_argument(os.str());
    }
    ln[i] = std::log(d.y[i]);
  }
  const Ols o = ols_poly(d.x, ln, 1);
  FitResult r;
  r.params = {{"ln_value0", o.beta[0]}, {"rate", o.beta[1]}};
  r.stderrs = {{"ln_value0", o.se[0]}, {"rate", o.se[1]}};
  r.covariance = o.cov;
  r.r_squared = o.r2;
  r.window = w;
  r.n_points = o.n;
  return r;
}

FitResult fit_super_exponential(const std::vector<double>& t, const std::vector<double>& lnC,
                                std::optional<FitWindow> window, std::optional<double> gamma,
                                std::optional<double> g, std::optional<double> hbar) {
  const FitWindow w = window.value_or(kick_window(t));
  const Windowed d = apply_window(t, lnC, w);
  require_points(d, 5, "fit_super_exponential");
  const Ols o = ols_poly(d.x, d.y, 2);
  FitResult r;
  r.params = {{"a", o.beta[0]}, {"b", o.beta[1]}, {"c", o.beta[2]}};
  r.stderrs = {{"a", o.se[0]}, {"b", o.se[1]}, {"c", o.se[2]}};
  r.covariance = o.cov;
  r.r_squared = o.r2;
  r.window = w;
  r.n_points = o.n;
  if (!(o.beta[2] > 2.0 * o.se[2])) r.flags.push_back("not-super-exponential");
  if (gamma) {
    r.params["eta"] = o.beta[2] / *gamma;
    r.stderrs["eta"] = o.se[2] / std::abs(*gamma);
    r.params["alpha_if_beta0"] = o.beta[1] / *gamma;
    if (g && hbar) {
      const double lg = std::log((*g / (kPi * *hbar)) * (*g / (kPi * *hbar)));
      r.params["beta_if_alpha0"] = o.beta[1] / lg;
      // the linear term is alpha*gamma + beta*ln(g/pi hbar)^2: one number,
      // two prefactors - only the bounds above are identifiable
      r.flags.push_back("alpha-beta-degenerate");
    }
  }
  return r;
}

namespace {

struct TailPoints {
  std::vector<double> absp, val;
  FitWindow window;
};

// Collect (|p|, |psi|^2) for the tail: default window runs from the 90th
// mass percentile of |p| to 95% of the basis edge.
TailPoints tail_points(const core::Distribution& dist, std::optional<FitWindow> window,
                       const char* who) {
  if (dist.kind != core::Distribution::Kind::Momentum) {
    std::ostringstream os;
    os << who << ": expected a momentum distribution";
    throw std::invalid_argument(os.str());
  }
  const int N = dist.grid.N;
  const double hbar = dist.grid.hbar;

  TailPoints out;
  if (window) {
    out.window = *window;
  } else {
    std::vector<std::pair<double, double>> mass;  // (|p|, weight)
    double total = 0.0;
    for (int n = dist.grid.nmin(); n <= dist.grid.nmax(); ++n) {
      const double v = dist.at_mode(n);
      mass.emplace_back(std::abs(n) * hbar, v);
      total += v;
    }
    std::sort(mass.begin(), mass.end());
    double cum = 0.0, p90 = mass.back().first;
    for (const auto& [ap, v] : mass) {
      cum += v;
      if (cum >= 0.9 * total) {
        p90 = ap;
        break;
      }
    }
    out.window = {p90, 0.95 * (N / 2) * hbar};
  }
  for (int n = dist.grid.nmin(); n <= dist.grid.nmax(); ++n) {
    if (n == 0) continue;
    const double ap = std::abs(n) * hbar;
    if (ap < out.window.lo || ap > out.window.hi) continue;
    out.absp.push_back(ap);
    out.val.push_back(dist.at_mode(n));
  }
  return out;
}

void require_positive_tail(const TailPoints& tp, const char* who) {
  for (std::size_t i = 0; i < tp.val.size(); ++i)
    if (!(tp.val[i] > 0.0)) {
      std::ostringstream os;
      os << who << ": nonpositive tail value at |p|=" << tp.absp[i];
      throw std::invalid_argument(os.str());
    }
}

}  // namespace

FitResult fit_power_law(const core::Distribution& dist, std::optional<FitWindow> window) {
  TailPoints tp = tail_points(dist, window, "fit_power_law");
  if (tp.absp.size() < 3) {
    std::ostringstream os;
    os << "fit_power_law: window too small (" << tp.absp.size() << " point(s))";
    throw std::invalid_argument(os.str());
  }
  require_positive_tail(tp, "fit_power_law");
  std::vector<double> lx(tp.absp.size()), ly(tp.absp.size());
  for (std::size_t i = 0; i < tp.absp.size(); ++i) {
    lx[i] = std::log(tp.absp[i]);
    ly[i] = std::log(tp.val[i]);
  }
  const Ols o = ols_poly(lx, ly, 1);
  FitResult r;
  r.params = {{"ln_amplitude", o.beta[0]}, {"exponent", o.beta[1]}};
  r.stderrs = {{"ln_amplitude", o.se[0]}, {"exponent", o.se[1]}};
  r.covariance = o.cov;
  r.r_squared = o.r2;
  r.window = tp.window;
  r.n_points = o.n;
  if (o.r2 < 0.97) r.flags.push_back("model-mismatch");
  return r;
}

FitResult fit_localization_length(const core::Distribution& dist,
                                  std::optional<FitWindow> window) {
  TailPoints tp = tail_points(dist, window, "fit_localization_length");
  double peak = 0.0;
  for (double v : dist.values) peak = std::max(peak, v);
  // drop the FFT round-off floor before fitting
  std::vector<double> px, py;
  for (std::size_t i = 0; i < tp.absp.size(); ++i) {
    if (tp.val[i] < 1e-28 * peak) continue;
    px.push_back(tp.absp[i]);
    py.push_back(tp.val[i]);
  }
  if (px.size() < 3) {
    std::ostringstream os;
    os << "fit_localization_length: window too small (" << px.size() << " point(s))";
    throw std::invalid_argument(os.str());
  }
  TailPoints kept;
  kept.absp = px;
  kept.val = py;
  require_positive_tail(kept, "fit_localization_length");
  std::vector<double> ly(py.size());
  for (std::size_t i = 0; i < py.size(); ++i) ly[i] = std::log(py[i]);
  const Ols o = ols_poly(px, ly, 1);
  FitResult r;
  const double slope = o.beta[1];
  r.params = {{"ln_amplitude", o.beta[0]}, {"slope", slope}};
  r.stderrs = {{"ln_amplitude", o.se[0]}, {"slope", o.se[1]}};
  // a slope this shallow means a length beyond any representable basis:
  // treat it as non-decaying rather than reporting xi ~ 1/rounding
  if (slope < -1e-9) {
    r.params["xi"] = -1.0 / slope;
    r.stderrs["xi"] = o.se[1] / (slope * slope);
  } else {
    r.params["xi"] = std::numeric_limits<double>::infinity();
    r.stderrs["xi"] = std::numeric_limits<double>::infinity();
    r.flags.push_back("divergent");
  }
  r.covariance = o.cov;
  r.r_squared = o.r2;
  r.window = tp.window;
  r.n_points = o.n;
  if (o.r2 < 0.97) r.flags.push_back("model-mismatch");
  return r;
}

ConvexityReport convexity_check(const std::vector<double>& y) {
  if (y.size() < 3) throw std::invalid_argument("convexity_check: need >= 3 points");
  ConvexityReport rep;
  rep.convex = true;
  for (std::size_t i = 1; i + 1 < y.size(); ++i) {
    const double d2 = y[i + 1] - 2.0 * y[i] + y[i - 1];
    rep.second_differences.push_back(d2);
    if (!(d2 > 0.0)) rep.convex = false;
  }
  return rep;
}

}  // namespace otoclab::analysis
