#pragma once
// Echo-protocol OTOC  C(t) = -<[A(t), B]^2> = C1 + C2 - 2 Re C3  with B = p.
//
// For each t*, five steps: build the initial packet, forward-evolve t* kicks,
// apply A, backward-evolve t* kicks self-consistently, read the observables:
//   C1 = <psi_R(0)| B^2 |psi_R(0)>,   |psi_R(0)> = Udag A U |psi(0)>
//   C2 = <phi_R(0)| phi_R(0)>,        |phi_R(0)> = Udag A U  B |psi(0)>
//   C3 = <psi_R(0)| B |phi_R(0)>
// The map U is state dependent (nonlinear kick), so every leg runs its own
// evolution; the B-perturbed start of the C2 leg is deliberately not
// renormalized (its smaller norm weakens that leg's kicks - that is physics,
// not a bug). Each t* is a fresh protocol run.

#include <string>
#include <vector>

#include "otoclab/config.hpp"
#include "otoclab/propagator.hpp"

namespace otoclab::otoc {

enum class PerturbationKind { MomentumOp, AngleOp };

struct OtocRecord {
  int t = 0;
  double C1 = 0.0, C2 = 0.0, ReC3 = 0.0, C = 0.0;
  double norm_tilde = 0.0;       // ||A psi(t)||^2, carried by the backward leg
  double mean_energy_fwd = 0.0;  // <p^2> of the unperturbed forward state at t
  std::vector<double> forward_energy;   // C1-leg E(0..t)
  std::vector<double> backward_energy;  // C1-leg E over t' = 0..t (0 = right after A)
};

struct OtocSeries {
  std::vector<OtocRecord> records;
  ExperimentConfig config;
  bool truncated = false;
  int truncated_at = -1;  // first t* that could not be completed
  std::string why;
};

OtocSeries otoc(const ExperimentConfig& cfg, PerturbationKind A, PerturbationKind B, int t_max);

struct DominanceRow {
  int t = 0;
  double c2_over_c1 = 0.0;
  double rec3_over_c1 = 0.0;
  bool flagged = false;  // C1 fails to dominate or ratios undefined
};
std::vector<DominanceRow> dominance_report(const OtocSeries& series);

struct ScalingCell {
  double g = 0.0;
  int N = 0;
  double C_tstar = 0.0;
  double ntilde = 0.0;        // <psi(t*)|theta^2|psi(t*)> quadrature
  double norm_tilde = 0.0;    // actual ||theta psi(t*)||^2
  double e_tilde = 0.0;       // <p^2> right after the theta action
  double backward_rate = 0.0; // fitted rate of the backward energy trace
  bool exhausted = false;
};
std::vector<ScalingCell> scaling_sweep(const std::vector<double>& g_list,
                                       const std::vector<int>& N_list, int t_star,
                                       ExperimentConfig base);

// Exponential rate of a backward-leg energy trace (index = kicks into the
// leg), fitted over the window before the trace nears the basis edge: points
// with E <= 5% of edge_energy, where edge_energy = (N hbar / 2)^2 times the
// leg norm. Returns 0 when fewer than 3 points qualify.
double backward_energy_rate(const std::vector<double>& energy, double edge_energy);

// Energy/norm bookkeeping of one theta-protocol run:
// forward leg, jump after the theta action, backward leg.
struct EchoTrace {
  std::vector<double> forward_energy, forward_norm;    // t = 0..t*
  double e_tilde = 0.0;   // <p^2> right after theta
  double n_tilde = 0.0;   // theta second moment at t*
  double norm_tilde = 0.0;// actual post-theta squared norm
  std::vector<double> backward_energy, backward_norm;  // t' = 0..t*
  bool truncated = false;
  int truncated_at = -1;
};
EchoTrace energy_trace_experiment(const ExperimentConfig& cfg, int t_star);

}  // namespace otoclab::otoc
