#pragma once
// One-period Floquet map of the kicked nonlinear ring and its exact inverse.
//
// Forward:  U = U_f U_K, kick first:
//   U_K: u_j *= exp(-i g |u_j|^2 / hbar)   on the angle grid
//   U_f: psi_n *= exp(-i n^2 hbar / 2)     in the momentum basis
// Backward: U^dag = U_K^dag U_f^dag, free inverse first, then the kick phase
// rebuilt from the instantaneous density of the backward-evolving state.
// The kick only changes phases (|u_j| is invariant), so backward exactly
// inverts an unperturbed forward step; after a mid-protocol perturbation the
// backward leg is self-consistent, which is what makes the echo sensitive.

#include <optional>
#include <string>
#include <vector>

#include "otoclab/state.hpp"

namespace otoclab::prop {

using core::GridSpec;
using core::QuantumState;

struct FloquetParams {
  double g = 1.5;
  GridSpec grid;
};

// Kick harmonics K_n = 4 g Y_n, Y_n = (1/4pi) sum_m conj(psi_m) psi_{m+n},
// stored for n = 1 .. N/2-1. The density is real, so Y_n is real up to
// rounding for symmetric-density states; the worst imaginary residue is kept
// as a diagnostic.
struct KickSpectrum {
  std::vector<double> K;
  std::vector<double> Y;
  double max_imag_residual = 0.0;
  int harmonics() const { return static_cast<int>(K.size()); }
};

struct EvolutionGuard {
  double edge_mass_threshold = 1e-8;  // relative mass in the outer 10% of modes
  double norm_drift_threshold = 1e-9;
  bool edge_check = true;  // disabled on theta-perturbed backward legs, where a
                           // |p|^-2 edge tail is the object of study
};

struct GuardBreach {
  int step = -1;
  double value = 0.0;
  std::string what;  // "basis exhausted" or "norm drift"
};

QuantumState step_forward(const QuantumState& s, const FloquetParams& par);
QuantumState step_backward(const QuantumState& s, const FloquetParams& par);

// direct correlation sum (production route)
KickSpectrum kick_spectrum(const QuantumState& s, double g);
// Fourier coefficients of the grid density; second route for equivalence
// checks (identical up to basis-truncation aliasing at lags >= N/2)
KickSpectrum kick_spectrum_density_route(const QuantumState& s, double g);

double edge_mass_fraction(const QuantumState& s);
std::optional<GuardBreach> check_guard(const QuantumState& s, const EvolutionGuard& g,
                                       double norm_ref, int step);

struct StepRecord {
  int t = 0;
  double norm = 0.0;
  double energy = 0.0;
};

struct RecordSet {
  bool spectra = false;
  std::vector<int> snapshot_times;
};

struct EvolutionTrace {
  std::vector<StepRecord> steps;  // index 0 holds the initial observables
  std::vector<KickSpectrum> spectra;
  std::vector<int> snapshot_times;
  std::vector<QuantumState> snapshots;
  QuantumState final_state;
  bool truncated = false;
  GuardBreach breach;
};

EvolutionTrace evolve(QuantumState s, const FloquetParams& par, int steps,
                      const RecordSet& rec = {}, const EvolutionGuard& guard = {});

}  // namespace otoclab::prop
