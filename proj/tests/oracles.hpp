#pragma once
// Independent reference implementations for tests. Everything here is the
// slow, obvious route: direct O(N^2) transforms, dense matrices, plain loops.
// None of it shares numerics with the production code beyond the state
// container, so agreement is a cross-implementation check, not a tautology.

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "otoclab/state.hpp"

namespace oracle {

using otoclab::core::cplx;
using otoclab::core::GridSpec;
using otoclab::core::QuantumState;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

// u_j = sum_n a_n exp(i n theta_j) / sqrt(2 pi), direct sum over signed n
inline std::vector<cplx> to_angle(const QuantumState& s) {
  const int N = s.grid.N;
  std::vector<cplx> u(static_cast<std::size_t>(N));
  const double norm = 1.0 / std::sqrt(kTwoPi);
  for (int j = 0; j < N; ++j) {
    const double th = kTwoPi * j / N;
    cplx acc{0.0, 0.0};
    for (int n = s.grid.nmin(); n <= s.grid.nmax(); ++n)
      acc += s.amp(n) * std::polar(1.0, n * th);
    u[static_cast<std::size_t>(j)] = acc * norm;
  }
  return u;
}

// a_n = (dtheta / sqrt(2 pi)) sum_j u_j exp(-i n theta_j)
inline QuantumState from_angle(GridSpec grid, const std::vector<cplx>& u) {
  const int N = grid.N;
  QuantumState s(grid);
  const double w = (kTwoPi / N) / std::sqrt(kTwoPi);
  for (int n = grid.nmin(); n <= grid.nmax(); ++n) {
    cplx acc{0.0, 0.0};
    for (int j = 0; j < N; ++j) {
      const double th = kTwoPi * j / N;
      acc += u[static_cast<std::size_t>(j)] * std::polar(1.0, -n * th);
    }
    s.set_amp(n, acc * w);
  }
  return s;
}

// one Floquet period, kick first, then free flight
inline QuantumState step_forward(const QuantumState& s, double g) {
  auto u = to_angle(s);
  for (auto& v : u) v *= std::polar(1.0, -g * std::norm(v) / s.grid.hbar);
  QuantumState out = from_angle(s.grid, u);
  for (int n = out.grid.nmin(); n <= out.grid.nmax(); ++n)
    out.set_amp(n, out.amp(n) * std::polar(1.0, -0.5 * n * double(n) * out.grid.hbar));
  return out;
}

// exact inverse: undo the free flight, then undo the kick phase, which only
// depends on |u| and |u| is what the kick preserves
inline QuantumState step_backward(const QuantumState& s, double g) {
  QuantumState mid = s;
  for (int n = mid.grid.nmin(); n <= mid.grid.nmax(); ++n)
    mid.set_amp(n, mid.amp(n) * std::polar(1.0, 0.5 * n * double(n) * mid.grid.hbar));
  auto u = to_angle(mid);
  for (auto& v : u) v *= std::polar(1.0, g * std::norm(v) / mid.grid.hbar);
  return from_angle(mid.grid, u);
}

// dense truncated theta matrix in signed order: row n, column m,
// <n|theta|m> = pi (n = m), 1/(i(m-n)) otherwise
inline QuantumState apply_theta_dense(const QuantumState& s) {
  QuantumState out(s.grid);
  for (int n = s.grid.nmin(); n <= s.grid.nmax(); ++n) {
    cplx acc{0.0, 0.0};
    for (int m = s.grid.nmin(); m <= s.grid.nmax(); ++m) {
      const cplx el = (m == n) ? cplx{kPi, 0.0} : cplx{0.0, -1.0 / (m - n)};
      acc += el * s.amp(m);
    }
    out.set_amp(n, acc);
  }
  return out;
}

inline QuantumState apply_p(const QuantumState& s) {
  QuantumState out(s.grid);
  for (int n = s.grid.nmin(); n <= s.grid.nmax(); ++n)
    out.set_amp(n, s.amp(n) * (n * s.grid.hbar));
  return out;
}

inline cplx inner(const QuantumState& a, const QuantumState& b) {
  cplx acc{0.0, 0.0};
  for (int n = a.grid.nmin(); n <= a.grid.nmax(); ++n)
    acc += std::conj(a.amp(n)) * b.amp(n);
  return acc;
}

inline double norm2(const QuantumState& s) { return oracle::inner(s, s).real(); }

// echo-protocol OTOC assembled as a single vector difference,
//   C = || A_t(B psi0) - B A_t(psi0) ||^2,  A_t(X) = bwd^t(A(fwd^t(X))),
// instead of the production C1 + C2 - 2 Re C3 bookkeeping
inline double echo_otoc(const QuantumState& psi0, double g, int t, bool theta_perturbation) {
  auto a_t = [&](QuantumState x) {
    for (int k = 0; k < t; ++k) x = step_forward(x, g);
    x = theta_perturbation ? apply_theta_dense(x) : oracle::apply_p(x);
    for (int k = 0; k < t; ++k) x = step_backward(x, g);
    return x;
  };
  const QuantumState left = a_t(oracle::apply_p(psi0));
  const QuantumState right = oracle::apply_p(a_t(psi0));
  double acc = 0.0;
  for (int n = psi0.grid.nmin(); n <= psi0.grid.nmax(); ++n)
    acc += std::norm(left.amp(n) - right.amp(n));
  return acc;
}

// Chirikov standard map, own wrap so the arithmetic path differs
inline void standard_map_step(double& theta, double& p, double K) {
  p += K * std::sin(theta);
  theta = std::fmod(theta + p, kTwoPi);
  if (theta < 0.0) theta += kTwoPi;
}

// xorshift-based filler, unrelated to the production counter RNG
inline QuantumState random_state(GridSpec grid, std::uint64_t seed, bool normalized = true) {
  QuantumState s(grid);
  std::uint64_t x = seed ? seed : 0x9e3779b97f4a7c15ull;
  auto next = [&x]() {
    x ^= x << 13;
    x ^= x >> 7;
    x ^= x << 17;
    return 5.421010862427522e-20 * static_cast<double>(x) - 0.5;  // ~U(-0.5, 0.5)
  };
  for (auto& a : s.a) a = cplx{next(), next()};
  if (normalized) {
    const double n = std::sqrt(norm2(s));
    for (auto& a : s.a) a /= n;
  }
  return s;
}

}  // namespace oracle
