#include "otoclab/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>
#include <utility>

#include "otoclab/fourier.hpp"
#include "otoclab/kernels.hpp"

namespace otoclab::prop {

namespace {

constexpr double kFourPi = 4.0 * std::numbers::pi;

// exp(-i n^2 hbar / 2) in storage order, cached per (N, hbar)
const std::vector<core::cplx>& kinetic_phase(const GridSpec& grid) {
  thread_local std::map<std::pair<int, double>, std::vector<core::cplx>> cache;
  const auto key = std::make_pair(grid.N, grid.hbar);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;

  const int N = grid.N;
  std::vector<core::cplx> ph(static_cast<std::size_t>(N));
  for (int k = 0; k < N; ++k) {
    const double n = (k < N / 2) ? k : k - N;
    ph[static_cast<std::size_t>(k)] = std::polar(1.0, -0.5 * n * n * grid.hbar);
  }
  return cache.emplace(key, std::move(ph)).first->second;
}

}  // namespace

QuantumState step_forward(const QuantumState& s, const FloquetParams& par) {
  auto u = core::to_angle_grid(s);
  kernels::density_phase(u.data(), u.size(), -par.g / par.grid.hbar);
  QuantumState out = core::from_angle_grid(s.grid, u);
  kernels::phase_multiply(out.a.data(), kinetic_phase(par.grid).data(), out.a.size());
  return out;
}

QuantumState step_backward(const QuantumState& s, const FloquetParams& par) {
  QuantumState tmp = s;
  const auto& ph = kinetic_phase(par.grid);
  for (std::size_t k = 0; k < tmp.a.size(); ++k) tmp.a[k] *= std::conj(ph[k]);
  auto u = core::to_angle_grid(tmp);
  kernels::density_phase(u.data(), u.size(), +par.g / par.grid.hbar);
  return core::from_angle_grid(s.grid, u);
}

KickSpectrum kick_spectrum(const QuantumState& s, double g) {
  const int N = s.grid.N;
  const int H = N / 2 - 1;
  // signed-order copy: v[i] = psi_{i - N/2}
  std::vector<core::cplx> v(static_cast<std::size_t>(N));
  for (int i = 0; i < N; ++i) v[static_cast<std::size_t>(i)] = s.amp(i - N / 2);

  KickSpectrum ks;
  ks.K.resize(static_cast<std::size_t>(H));
  ks.Y.resize(static_cast<std::size_t>(H));
  double imax = 0.0;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) reduction(max : imax)
#endif
  for (int n = 1; n <= H; ++n) {
    core::cplx y{0.0, 0.0};
    for (int m = 0; m + n < N; ++m)
      y += std::conj(v[static_cast<std::size_t>(m)]) * v[static_cast<std::size_t>(m + n)];
    y /= kFourPi;
    ks.Y[static_cast<std::size_t>(n - 1)] = y.real();
    ks.K[static_cast<std::size_t>(n - 1)] = 4.0 * g * y.real();
    imax = std::max(imax, std::abs(y.imag()));
  }
  ks.max_imag_residual = imax;
  return ks;
}

KickSpectrum kick_spectrum_density_route(const QuantumState& s, double g) {
  const int N = s.grid.N;
  const int H = N / 2 - 1;
  auto u = core::to_angle_grid(s);
  std::vector<core::cplx> rho(static_cast<std::size_t>(N));
  for (int j = 0; j < N; ++j) rho[static_cast<std::size_t>(j)] = std::norm(u[static_cast<std::size_t>(j)]);
  std::vector<core::cplx> R(static_cast<std::size_t>(N));
  fft_engine(N).forward(rho.data(), R.data());
  // |psi(theta)|^2 = 2 sum_n Y_n e^{i n theta}  =>  Y_n = dtheta/(4 pi) sum_j rho_j e^{-i n theta_j}
  const double scale = s.grid.dtheta() / kFourPi;
  KickSpectrum ks;
  ks.K.resize(static_cast<std::size_t>(H));
  ks.Y.resize(static_cast<std::size_t>(H));
  double imax = 0.0;
  for (int n = 1; n <= H; ++n) {
    const core::cplx y = R[static_cast<std::size_t>(n)] * scale;
    ks.Y[static_cast<std::size_t>(n - 1)] = y.real();
    ks.K[static_cast<std::size_t>(n - 1)] = 4.0 * g * y.real();
    imax = std::max(imax, std::abs(y.imag()));
  }
  ks.max_imag_residual = imax;
  return ks;
}

double edge_mass_fraction(const QuantumState& s) {
  const int N = s.grid.N;
  const int side = std::max(1, N / 20);  // outer 10% of modes, split over both edges
  double edge = 0.0;
  for (int i = 0; i < side; ++i) {
    edge += std::norm(s.amp(s.grid.nmin() + i));
    edge += std::norm(s.amp(s.grid.nmax() - i));
  }
  const double total = core::norm(s);
  return total > 0.0 ? edge / total : 0.0;
}

std::optional<GuardBreach> check_guard(const QuantumState& s, const EvolutionGuard& g,
                                       double norm_ref, int step) {
  if (g.edge_check) {
    const double em = edge_mass_fraction(s);
    if (em > g.edge_mass_threshold)
      return GuardBreach{step, em, "basis exhausted"};
  }
  if (norm_ref > 0.0) {
    const double drift = std::abs(core::norm(s) - norm_ref) / norm_ref;
    if (drift > g.norm_drift_threshold)
      return GuardBreach{step, drift, "norm drift"};
  }
  return std::nullopt;
}

EvolutionTrace evolve(QuantumState s, const FloquetParams& par, int steps,
                      const RecordSet& rec, const EvolutionGuard& guard) {
  if (steps < 0) throw std::invalid_argument("evolve: steps must be >= 0");
  EvolutionTrace tr;
  const double norm_ref = core::norm(s);

  auto record = [&](int t) {
    tr.steps.push_back({t, core::norm(s), core::mean_energy(s)});
    // one spectrum per applied kick: the pre-kick state is what drives it,
    // so the final state contributes none
    if (rec.spectra && t < steps) tr.spectra.push_back(kick_spectrum(s, par.g));
    if (std::find(rec.snapshot_times.begin(), rec.snapshot_times.end(), t) !=
        rec.snapshot_times.end()) {
      tr.snapshot_times.push_back(t);
      tr.snapshots.push_back(s);
    }
  };

  record(0);
  for (int t = 1; t <= steps; ++t) {
    s = step_forward(s, par);
    if (auto breach = check_guard(s, guard, norm_ref, t)) {
      tr.truncated = true;
      tr.breach = *breach;
      break;
    }
    record(t);
  }
  tr.final_state = std::move(s);
  return tr;
}

}  // namespace otoclab::prop
