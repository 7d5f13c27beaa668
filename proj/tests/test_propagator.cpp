#include <cmath>
#include <complex>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "otoclab/propagator.hpp"
#include "otoclab/state.hpp"

using namespace otoclab;
using core::cplx;
using core::GridSpec;
using core::QuantumState;

namespace {
double max_amp_diff(const QuantumState& a, const QuantumState& b) {
  double m = 0.0;
  for (int n = a.grid.nmin(); n <= a.grid.nmax(); ++n)
    m = std::max(m, std::abs(a.amp(n) - b.amp(n)));
  return m;
}
}  // namespace

TEST_CASE("one period matches the direct-DFT oracle") {
  const GridSpec grid{128, 0.6};
  const prop::FloquetParams par{1.5, grid};
  auto s = core::make_gaussian_state(1.0, grid);
  auto o = s;
  for (int t = 0; t < 3; ++t) {
    s = prop::step_forward(s, par);
    o = oracle::step_forward(o, par.g);
    CHECK(max_amp_diff(s, o) < 1e-11);
  }
}

TEST_CASE("g=0 reduces to the free rotor") {
  const GridSpec grid{64, 0.6};
  const prop::FloquetParams par{0.0, grid};
  const auto s0 = oracle::random_state(grid, 9);
  auto s = prop::step_forward(s0, par);
  for (int n = grid.nmin(); n <= grid.nmax(); ++n) {
    const cplx expect = s0.amp(n) * std::polar(1.0, -0.5 * n * double(n) * grid.hbar);
    CHECK(std::abs(s.amp(n) - expect) < 1e-14);
  }
}

TEST_CASE("norm is conserved to rounding over 20 periods") {
  const GridSpec grid{1024, 0.6};
  const prop::FloquetParams par{1.5, grid};
  auto s = core::make_gaussian_state(1.0, grid);
  for (int t = 0; t < 20; ++t) {
    s = prop::step_forward(s, par);
    CHECK(std::abs(core::norm(s) - 1.0) < 1e-10);
  }
}

TEST_CASE("backward exactly inverts an unperturbed forward run") {
  const GridSpec grid{1024, 0.6};
  const prop::FloquetParams par{1.5, grid};
  const auto s0 = core::make_gaussian_state(1.0, grid);
  auto s = s0;
  const int t = 8;
  for (int k = 0; k < t; ++k) s = prop::step_forward(s, par);
  for (int k = 0; k < t; ++k) s = prop::step_backward(s, par);
  const double fidelity = std::norm(core::inner(s0, s));
  CHECK(fidelity > 1.0 - 1e-10);
}

TEST_CASE("kick spectrum: correlation route equals density route") {
  const GridSpec grid{512, 0.6};
  const prop::FloquetParams par{1.5, grid};
  auto s = core::make_gaussian_state(1.0, grid);
  for (int t = 0; t <= 3; ++t) {
    const auto ks1 = prop::kick_spectrum(s, par.g);
    const auto ks2 = prop::kick_spectrum_density_route(s, par.g);
    REQUIRE(ks1.harmonics() == ks2.harmonics());
    double m = 0.0;
    for (int n = 0; n < ks1.harmonics(); ++n)
      m = std::max(m, std::abs(ks1.K[static_cast<std::size_t>(n)] -
                               ks2.K[static_cast<std::size_t>(n)]));
    CHECK(m < 1e-12);
    CHECK(ks1.max_imag_residual < 1e-12);
    s = prop::step_forward(s, par);
  }
}

TEST_CASE("kick spectrum against a direct correlation sum") {
  const GridSpec grid{64, 0.6};
  const auto s = core::make_gaussian_state(2.0, grid);
  const auto ks = prop::kick_spectrum(s, 1.5);
  REQUIRE(ks.harmonics() == grid.N / 2 - 1);
  for (int n = 1; n < grid.N / 2; ++n) {
    cplx y{0.0, 0.0};
    for (int m = grid.nmin(); m + n <= grid.nmax(); ++m)
      y += std::conj(s.amp(m)) * s.amp(m + n);
    y /= 4.0 * oracle::kPi;
    CHECK(ks.Y[static_cast<std::size_t>(n - 1)] ==
          doctest::Approx(y.real()).epsilon(1e-11));
    CHECK(ks.K[static_cast<std::size_t>(n - 1)] ==
          doctest::Approx(4.0 * 1.5 * y.real()).epsilon(1e-11));
  }
}

TEST_CASE("guards name what broke") {
  const GridSpec grid{256, 0.6};
  QuantumState edgy(grid);
  edgy.set_amp(grid.nmax(), cplx{1.0, 0.0});
  CHECK(prop::edge_mass_fraction(edgy) == doctest::Approx(1.0));

  const prop::EvolutionGuard guard{};
  auto breach = prop::check_guard(edgy, guard, 1.0, 4);
  REQUIRE(breach.has_value());
  CHECK(breach->what == "basis exhausted");
  CHECK(breach->step == 4);

  prop::EvolutionGuard off = guard;
  off.edge_check = false;
  CHECK_FALSE(prop::check_guard(edgy, off, 1.0, 4).has_value());

  QuantumState mid(grid);
  mid.set_amp(0, cplx{1.0, 0.0});
  auto drift = prop::check_guard(mid, guard, 2.0, 7);
  REQUIRE(drift.has_value());
  CHECK(drift->what == "norm drift");
  CHECK_FALSE(prop::check_guard(mid, guard, 1.0, 7).has_value());
}

TEST_CASE("evolve records observables and honors the guard") {
  const GridSpec grid{512, 0.6};
  const prop::FloquetParams par{1.5, grid};
  const auto s0 = core::make_gaussian_state(1.0, grid);

  prop::RecordSet rec;
  rec.spectra = true;
  rec.snapshot_times = {0, 2};
  const auto tr = prop::evolve(s0, par, 3, rec);
  CHECK_FALSE(tr.truncated);
  REQUIRE(tr.steps.size() == 4);  // slot 0 holds the initial observables
  CHECK(tr.steps[0].t == 0);
  CHECK(tr.steps[0].energy == doctest::Approx(core::mean_energy(s0)));
  CHECK(tr.steps[3].energy > tr.steps[0].energy);
  for (const auto& st : tr.steps) CHECK(st.norm == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(tr.spectra.size() == 3);  // one per applied kick
  REQUIRE(tr.snapshots.size() == 2);
  CHECK(max_amp_diff(tr.snapshots[0], s0) == 0.0);

  // an impossible edge threshold truncates immediately and keeps partials
  prop::EvolutionGuard tight;
  tight.edge_mass_threshold = 1e-300;
  const auto cut = prop::evolve(s0, par, 5, {}, tight);
  CHECK(cut.truncated);
  CHECK(cut.breach.what == "basis exhausted");
  CHECK(static_cast<int>(cut.steps.size()) - 1 < 5);
}

TEST_CASE("energy growth accelerates toward the per-kick fold") {
  // after the transient the kick amplifies <p^2> by roughly 1 + (g N0/pi hbar)^2
  // per period; check the late-window ratio sits in a generous band around it
  const GridSpec grid{4096, 0.6};
  const prop::FloquetParams par{1.5, grid};
  const auto tr = prop::evolve(core::make_gaussian_state(1.0, grid), par, 8);
  REQUIRE_FALSE(tr.truncated);
  const double fold = 1.0 + std::pow(1.5 / (oracle::kPi * 0.6), 2.0);
  for (std::size_t i = 4; i + 1 < tr.steps.size(); ++i) {
    const double ratio = tr.steps[i + 1].energy / tr.steps[i].energy;
    CHECK(ratio > 1.0 + 0.25 * (fold - 1.0));
    CHECK(ratio < 1.0 + 2.5 * (fold - 1.0));
  }
}
