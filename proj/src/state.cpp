#include "otoclab/state.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "otoclab/fourier.hpp"
#include "otoclab/kernels.hpp"

namespace otoclab::core {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}  // namespace

void GridSpec::validate() const {
  if (N < 8 || N % 2 != 0) {
    std::ostringstream os;
    os << "N must be even and >= 8 (got " << N << ")";
    throw std::invalid_argument(os.str());
  }
  if (!(hbar > 0.0) || !std::isfinite(hbar)) {
    throw std::invalid_argument("hbar must be positive and finite");
  }
}

double GridSpec::dtheta() const { return kTwoPi / N; }
double GridSpec::theta(int j) const { return kTwoPi * j / N; }

std::vector<cplx> to_angle_grid(const QuantumState& s) {
  std::vector<cplx> u(s.a.size());
  fft_engine(s.grid.N).backward(s.a.data(), u.data());
  kernels::scale(u.data(), u.size(), 1.0 / std::sqrt(kTwoPi));
  return u;
}

QuantumState from_angle_grid(GridSpec grid, const std::vector<cplx>& u) {
  if (static_cast<int>(u.size()) != grid.N)
    throw std::invalid_argument("from_angle_grid: size mismatch");
  QuantumState s(grid);
  fft_engine(grid.N).forward(u.data(), s.a.data());
  kernels::scale(s.a.data(), s.a.size(), std::sqrt(kTwoPi) / grid.N);
  return s;
}

QuantumState make_gaussian_state(double sigma, GridSpec grid) {
  grid.validate();
  if (!(sigma > 0.0) || !std::isfinite(sigma))
    throw std::invalid_argument("sigma must be positive and finite");
  // images |k| > 3 are dropped; their norm share is bounded by the Gaussian
  // mass beyond |theta| = 7 pi
  const double truncation = std::erfc(std::sqrt(sigma) * 7.0 * kPi);
  if (truncation > 1e-8) {
    std::ostringstream os;
    os << "sigma=" << sigma << " too small: periodization over images k in [-3,3] "
       << "drops " << truncation << " of the norm (limit 1e-8)";
    throw std::invalid_argument(os.str());
  }

  const int N = grid.N;
  std::vector<cplx> u(static_cast<std::size_t>(N));
  const double amp = std::pow(sigma / kPi, 0.25);
  for (int j = 0; j < N; ++j) {
    double th = grid.theta(j);
    if (th >= kPi) th -= kTwoPi;  // Gaussian branch [-pi, pi)
    double v = 0.0;
    for (int k = -3; k <= 3; ++k) {
      const double x = th + kTwoPi * k;
      v += std::exp(-0.5 * sigma * x * x);
    }
    u[static_cast<std::size_t>(j)] = amp * v;
  }
  QuantumState s = from_angle_grid(grid, u);
  const double n = norm(s);
  kernels::scale(s.a.data(), s.a.size(), 1.0 / std::sqrt(n));
  return s;
}

double norm(const QuantumState& s) { return kernels::sum_abs2(s.a.data(), s.a.size()); }

double mean_energy(const QuantumState& s) {
  const int N = s.grid.N;
  const double h = s.grid.hbar;
  std::vector<double> w(static_cast<std::size_t>(N));
  for (int k = 0; k < N; ++k) {
    const int n = (k < N / 2) ? k : k - N;
    w[static_cast<std::size_t>(k)] = (n * h) * (n * h);
  }
  return kernels::sum_abs2_weighted(s.a.data(), w.data(), s.a.size());
}

double theta_second_moment(const QuantumState& s) {
  // Operator moment <psi|theta^dag theta|psi> of the truncated matrix, not a
  // grid quadrature: the packet sits at the theta = 0 branch cut, so the
  // sampled integrand theta^2 |u|^2 carries an O(1/N) aliasing error there,
  // while this value is exactly the squared norm the perturbation produces.
  return norm(apply_theta(s));
}

QuantumState apply_p(const QuantumState& s) {
  const int N = s.grid.N;
  QuantumState out(s.grid);
  for (int k = 0; k < N; ++k) {
    const int n = (k < N / 2) ? k : k - N;
    out.a[static_cast<std::size_t>(k)] = s.a[static_cast<std::size_t>(k)] * (n * s.grid.hbar);
  }
  return out;
}

namespace {

// The truncated theta matrix is Toeplitz in m - n:
//   T_0 = pi, T_k = 1/(i k)  (k = m - n != 0).
// Applying it is a length-2N circular convolution of the signed-order
// amplitudes against the kernel c[l] = T_{-l} (zero-padded input, slot l = N
// never reached), done with one FFT pair per call. Exact to rounding, i.e.
// identical to the dense matrix route that serves as the small-N oracle.
const std::vector<cplx>& theta_kernel_fft(int N) {
  thread_local std::map<int, std::vector<cplx>> cache;
  auto it = cache.find(N);
  if (it != cache.end()) return it->second;

  const int L = 2 * N;
  std::vector<cplx> c(static_cast<std::size_t>(L), cplx{0.0, 0.0});
  c[0] = cplx{kPi, 0.0};
  for (int l = 1; l < N; ++l) {
    // T_{-l} = 1/(-i l) = i / l
    c[static_cast<std::size_t>(l)] = cplx{0.0, 1.0 / l};
  }
  for (int l = N + 1; l < L; ++l) {
    // this slot meets lags m - n = 2N - l in [1, N-1]: T_k = -i / k
    c[static_cast<std::size_t>(l)] = cplx{0.0, -1.0 / (L - l)};
  }
  std::vector<cplx> C(static_cast<std::size_t>(L));
  fft_engine(L).forward(c.data(), C.data());
  return cache.emplace(N, std::move(C)).first->second;
}

}  // namespace

QuantumState apply_theta(const QuantumState& s) {
  const int N = s.grid.N;
  const int L = 2 * N;
  const auto& C = theta_kernel_fft(N);

  std::vector<cplx> x(static_cast<std::size_t>(L), cplx{0.0, 0.0});
  for (int i = 0; i < N; ++i) x[static_cast<std::size_t>(i)] = s.amp(i - N / 2);

  std::vector<cplx> X(static_cast<std::size_t>(L));
  auto& eng = fft_engine(L);
  eng.forward(x.data(), X.data());
  kernels::phase_multiply(X.data(), C.data(), X.size());
  eng.backward(X.data(), x.data());

  QuantumState out(s.grid);
  const double invL = 1.0 / L;
  for (int i = 0; i < N; ++i) out.set_amp(i - N / 2, x[static_cast<std::size_t>(i)] * invL);
  return out;
}

Distribution momentum_distribution(const QuantumState& s) {
  const int N = s.grid.N;
  Distribution d;
  d.kind = Distribution::Kind::Momentum;
  d.grid = s.grid;
  d.values.resize(static_cast<std::size_t>(N));
  for (int i = 0; i < N; ++i) d.values[static_cast<std::size_t>(i)] = std::norm(s.amp(i - N / 2));
  return d;
}

Distribution angle_distribution(const QuantumState& s) {
  const int N = s.grid.N;
  const auto u = to_angle_grid(s);
  Distribution d;
  d.kind = Distribution::Kind::Angle;
  d.grid = s.grid;
  d.values.resize(static_cast<std::size_t>(N));
  // density per unit angle: sum_j values[j] * dtheta recovers the norm
  for (int j = 0; j < N; ++j)
    d.values[static_cast<std::size_t>(j)] = std::norm(u[static_cast<std::size_t>(j)]);
  return d;
}

cplx inner(const QuantumState& a, const QuantumState& b) {
  if (a.grid.N != b.grid.N) throw std::invalid_argument("inner: grid mismatch");
  return kernels::inner(a.a.data(), b.a.data(), a.a.size());
}

}  // namespace otoclab::core
