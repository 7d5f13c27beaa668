#include "otoclab/otoc.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

#include "otoclab/analysis.hpp"
#include "otoclab/kernels.hpp"

namespace otoclab::otoc {

using core::QuantumState;
using prop::EvolutionGuard;
using prop::FloquetParams;
using prop::GuardBreach;

namespace {

struct Leg {
  QuantumState state;
  std::vector<double> energy;
  std::vector<double> norm;
  bool ok = true;
  GuardBreach breach;
};

enum class Direction { Forward, Backward };

Leg run_leg(QuantumState s, const FloquetParams& par, int steps, Direction dir,
            const EvolutionGuard& guard) {
  Leg leg;
  leg.energy.push_back(core::mean_energy(s));
  leg.norm.push_back(core::norm(s));
  const double ref = leg.norm.front();
  for (int t = 1; t <= steps; ++t) {
    s = dir == Direction::Forward ? prop::step_forward(s, par) : prop::step_backward(s, par);
    if (auto b = prop::check_guard(s, guard, ref, t)) {
      leg.ok = false;
      leg.breach = *b;
      break;
    }
    leg.energy.push_back(core::mean_energy(s));
    leg.norm.push_back(core::norm(s));
  }
  leg.state = std::move(s);
  return leg;
}

QuantumState perturb(const QuantumState& s, PerturbationKind A) {
  return A == PerturbationKind::MomentumOp ? core::apply_p(s) : core::apply_theta(s);
}

EvolutionGuard forward_guard(const ExperimentConfig& cfg) {
  return {cfg.edge_mass_threshold, cfg.norm_drift_threshold, true};
}

EvolutionGuard backward_guard(const ExperimentConfig& cfg) {
  // the mid-protocol perturbation loads the spectral edge by construction
  // (the theta action through its |p|^-2 tail, the momentum action through
  // the p weighting), so backward legs watch norm drift only; the forward
  // legs' edge guard already certifies the underlying state
  return {cfg.edge_mass_threshold, cfg.norm_drift_threshold, false};
}

}  // namespace

OtocSeries otoc(const ExperimentConfig& cfg, PerturbationKind A, PerturbationKind B, int t_max) {
  if (B != PerturbationKind::MomentumOp)
    throw std::invalid_argument("otoc: B must be the momentum operator");
  if (t_max < 1) throw std::invalid_argument("otoc: t_max must be >= 1");
  cfg.validate();

  const core::GridSpec grid{cfg.N, cfg.hbar};
  const FloquetParams par{cfg.g, grid};
  const EvolutionGuard gf = forward_guard(cfg);
  const EvolutionGuard gb = backward_guard(cfg);

  const QuantumState psi0 = core::make_gaussian_state(cfg.sigma, grid);
  const QuantumState phi0 = core::apply_p(psi0);

  OtocSeries series;
  series.config = cfg;
  for (int ts = 1; ts <= t_max; ++ts) {
    Leg f1 = run_leg(psi0, par, ts, Direction::Forward, gf);
    if (!f1.ok) {
      series.truncated = true;
      series.truncated_at = ts;
      series.why = f1.breach.what;
      break;
    }
    QuantumState tilde = perturb(f1.state, A);
    const double norm_tilde = core::norm(tilde);
    Leg b1 = run_leg(std::move(tilde), par, ts, Direction::Backward, gb);

    Leg f2 = run_leg(phi0, par, ts, Direction::Forward, gf);
    Leg b2;
    if (f2.ok) b2 = run_leg(perturb(f2.state, A), par, ts, Direction::Backward, gb);
    if (!b1.ok || !f2.ok || !b2.ok) {
      series.truncated = true;
      series.truncated_at = ts;
      series.why = !b1.ok ? b1.breach.what : (!f2.ok ? f2.breach.what : b2.breach.what);
      break;
    }

    OtocRecord r;
    r.t = ts;
    r.norm_tilde = norm_tilde;
    r.mean_energy_fwd = f1.energy.back();
    r.C1 = core::mean_energy(b1.state);
    r.C2 = core::norm(b2.state);
    r.ReC3 = core::inner(b1.state, core::apply_p(b2.state)).real();
    r.C = r.C1 + r.C2 - 2.0 * r.ReC3;
    r.forward_energy = std::move(f1.energy);
    r.backward_energy = std::move(b1.energy);
    series.records.push_back(std::move(r));
  }
  return series;
}

std::vector<DominanceRow> dominance_report(const OtocSeries& series) {
  if (series.records.empty())
    throw std::invalid_argument("dominance_report: empty series");
  std::vector<DominanceRow> rows;
  rows.reserve(series.records.size());
  for (const auto& r : series.records) {
    DominanceRow d;
    d.t = r.t;
    if (r.C1 > 0.0 && std::isfinite(r.C1)) {
      d.c2_over_c1 = r.C2 / r.C1;
      d.rec3_over_c1 = std::abs(r.ReC3) / r.C1;
      d.flagged = !(d.c2_over_c1 < 1.0 && d.rec3_over_c1 < 1.0) ||
                  !std::isfinite(d.c2_over_c1) || !std::isfinite(d.rec3_over_c1);
    } else {
      d.c2_over_c1 = d.rec3_over_c1 = std::numeric_limits<double>::quiet_NaN();
      d.flagged = true;
    }
    rows.push_back(d);
  }
  return rows;
}

std::vector<ScalingCell> scaling_sweep(const std::vector<double>& g_list,
                                       const std::vector<int>& N_list, int t_star,
                                       ExperimentConfig base) {
  if (g_list.empty() || N_list.empty())
    throw std::invalid_argument("scaling_sweep: empty parameter list");
  if (t_star < 1) throw std::invalid_argument("scaling_sweep: t_star must be >= 1");

  std::vector<ScalingCell> cells;
  for (double g : g_list) {
    for (int N : N_list) {
      ExperimentConfig cfg = base;
      cfg.g = g;
      cfg.N = N;
      cfg.validate();
      const core::GridSpec grid{N, cfg.hbar};
      const FloquetParams par{g, grid};
      const EvolutionGuard gf = forward_guard(cfg);
      const EvolutionGuard gb = backward_guard(cfg);

      ScalingCell cell;
      cell.g = g;
      cell.N = N;

      const QuantumState psi0 = core::make_gaussian_state(cfg.sigma, grid);
      Leg f1 = run_leg(psi0, par, t_star, Direction::Forward, gf);
      if (!f1.ok) {
        cell.exhausted = true;
        cells.push_back(cell);
        continue;
      }
      QuantumState tilde = core::apply_theta(f1.state);
      cell.norm_tilde = core::norm(tilde);
      cell.ntilde = cell.norm_tilde;  // the angle second moment is that same norm
      cell.e_tilde = core::mean_energy(tilde);
      Leg b1 = run_leg(std::move(tilde), par, t_star, Direction::Backward, gb);

      Leg f2 = run_leg(core::apply_p(psi0), par, t_star, Direction::Forward, gf);
      Leg b2;
      if (f2.ok) b2 = run_leg(core::apply_theta(f2.state), par, t_star, Direction::Backward, gb);
      if (!b1.ok || !f2.ok || !b2.ok) {
        cell.exhausted = true;
        cells.push_back(cell);
        continue;
      }

      const double C1 = core::mean_energy(b1.state);
      const double C2 = core::norm(b2.state);
      const double ReC3 = core::inner(b1.state, core::apply_p(b2.state)).real();
      cell.C_tstar = C1 + C2 - 2.0 * ReC3;

      const double p_edge = 0.5 * N * cfg.hbar;
      cell.backward_rate = backward_energy_rate(b1.energy, p_edge * p_edge * cell.norm_tilde);
      cells.push_back(cell);
    }
  }
  return cells;
}

double backward_energy_rate(const std::vector<double>& energy, double edge_energy) {
  // the super-exponentially kicked backward leg rams the basis edge within a
  // few steps; only the head of the trace obeys the exponential law
  std::vector<double> tp, lnE;
  const double cap = 0.05 * edge_energy;
  for (std::size_t i = 0; i < energy.size(); ++i) {
    if (!(energy[i] > 0.0) || energy[i] > cap) break;
    tp.push_back(static_cast<double>(i));
    lnE.push_back(std::log(energy[i]));
  }
  if (tp.size() < 3) return 0.0;
  return analysis::fit_linear(tp, lnE).params.at("slope");
}

EchoTrace energy_trace_experiment(const ExperimentConfig& cfg, int t_star) {
  if (t_star < 1) throw std::invalid_argument("energy_trace_experiment: t_star must be >= 1");
  cfg.validate();
  const core::GridSpec grid{cfg.N, cfg.hbar};
  const FloquetParams par{cfg.g, grid};
  const EvolutionGuard gf = forward_guard(cfg);
  const EvolutionGuard gb = backward_guard(cfg);

  EchoTrace tr;
  const QuantumState psi0 = core::make_gaussian_state(cfg.sigma, grid);
  Leg f = run_leg(psi0, par, t_star, Direction::Forward, gf);
  tr.forward_energy = f.energy;
  tr.forward_norm = f.norm;
  if (!f.ok) {
    tr.truncated = true;
    tr.truncated_at = f.breach.step;
    return tr;
  }
  QuantumState tilde = core::apply_theta(f.state);
  tr.e_tilde = core::mean_energy(tilde);
  tr.norm_tilde = core::norm(tilde);
  tr.n_tilde = tr.norm_tilde;  // the angle second moment is that same norm
  Leg b = run_leg(std::move(tilde), par, t_star, Direction::Backward, gb);
  tr.backward_energy = b.energy;
  tr.backward_norm = b.norm;
  if (!b.ok) {
    tr.truncated = true;
    tr.truncated_at = b.breach.step;
  }
  return tr;
}

}  // namespace otoclab::otoc
