#include "otoclab/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "otoclab/analysis.hpp"
#include "otoclab/classical.hpp"
#include "otoclab/csvio.hpp"
#include "otoclab/manifest.hpp"
#include "otoclab/otoc.hpp"
#include "otoclab/svg.hpp"
#include "otoclab/version.hpp"

namespace otoclab::io {

namespace fs = std::filesystem;

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = {
      "quantum-otoc", "theta-otoc", "classical-otoc", "lyapunov",      "phase-portrait",
      "scaling",      "semiclassical", "echo-trace",  "fit"};
  return names;
}

namespace {

// Shared run context: collects files, guard events and notes, then writes the
// manifest exactly once.
struct Run {
  const ExperimentConfig& cfg;
  bool plot;
  fs::path dir;
  RunManifest manifest;
  RunResult result;
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();

  Run(const ExperimentConfig& c, bool p) : cfg(c), plot(p), dir(c.output_dir) {
    manifest.experiment = c.experiment;
    manifest.config = c;
    manifest.code_version = kVersion;
  }

  std::string file(const std::string& name) const { return (dir / name).string(); }

  void emitted(const std::string& name) {
    manifest.add_file(dir.string(), name);
    result.files.push_back(name);
  }

  void finish() {
    manifest.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_manifest(manifest, file("manifest.json"));
    result.files.push_back("manifest.json");
  }
};

std::string csv_name(const std::string& experiment) {
  std::string s = experiment;
  for (char& c : s)
    if (c == '-') c = '_';
  return s + ".csv";
}

void maybe_plot(Run& run, const std::string& name, const PlotSpec& spec,
                const std::vector<Series>& series) {
  if (!run.plot) return;
  try {
    write_plot(run.file(name), spec, series);
    run.emitted(name);
  } catch (const std::runtime_error& e) {
    run.manifest.guard_events.push_back(std::string("plot skipped: ") + e.what());
  }
}

// ---- quantum-otoc / theta-otoc ---------------------------------------------

RunResult run_quantum(Run& run, otoc::PerturbationKind A) {
  const auto series = otoc::otoc(run.cfg, A, otoc::PerturbationKind::MomentumOp, run.cfg.t_max);
  const std::string name = csv_name(run.cfg.experiment);
  {
    CsvWriter w(run.file(name), {"t", "C", "C1", "C2", "ReC3", "norm_tilde", "mean_energy"});
    for (const auto& r : series.records) {
      w.cell(r.t).cell(r.C).cell(r.C1).cell(r.C2).cell(r.ReC3).cell(r.norm_tilde).cell(
          r.mean_energy_fwd);
      w.endrow();
    }
    w.close();
  }
  run.emitted(name);

  if (run.plot && !series.records.empty()) {
    Series data{"C(t)", {}, {}, true, false};
    std::vector<double> ts, lnC;
    for (const auto& r : series.records) {
      data.x.push_back(r.t);
      data.y.push_back(r.C);
      if (r.C > 0.0) {
        ts.push_back(r.t);
        lnC.push_back(std::log(r.C));
      }
    }
    std::vector<Series> ss = {data};
    try {
      const auto fit = analysis::fit_super_exponential(ts, lnC);
      Series overlay{"quadratic fit", {}, {}, true, true};
      for (double t = ts.front(); t <= ts.back() + 1e-9; t += 0.25) {
        overlay.x.push_back(t);
        overlay.y.push_back(std::exp(fit.params.at("a") + fit.params.at("b") * t +
                                     fit.params.at("c") * t * t));
      }
      ss.push_back(overlay);
    } catch (const std::invalid_argument&) {
      // too few points for the overlay; data series still plotted
    }
    maybe_plot(run, csv_name(run.cfg.experiment) + ".svg",
               {"echo OTOC, g=" + g17(run.cfg.g), "t (kicks)", "C(t)", PlotKind::LogLinear}, ss);
  }

  if (series.truncated) {
    std::ostringstream os;
    os << "guard truncated at t*=" << series.truncated_at << " (" << series.why
       << "); partial results kept (" << series.records.size() << " rows)";
    run.manifest.guard_events.push_back(os.str());
    run.finish();
    return {kExitTruncated, os.str(), run.result.files};
  }
  run.finish();
  std::ostringstream os;
  os << "wrote " << run.file(name) << " (" << series.records.size() << " rows)";
  return {kExitOk, os.str(), run.result.files};
}

// ---- classical-otoc / lyapunov ----------------------------------------------

RunResult run_classical(Run& run) {
  const auto series = cls::sensitivity_run(run.cfg, run.cfg.t_max);
  const std::string name = csv_name(run.cfg.experiment);
  {
    CsvWriter w(run.file(name), {"t", "lnCcl", "lambda", "flag"});
    for (const auto& r : series.rows) {
      w.cell(r.t).cell(r.log_Ccl).cell(r.lambda).cell(r.flag);
      w.endrow();
    }
    w.close();
  }
  run.emitted(name);

  if (series.source_exhausted)
    run.manifest.guard_events.push_back("co-evolved kick source reached the basis edge");
  if (series.excluded > 0)
    run.manifest.guard_events.push_back(std::to_string(series.excluded) +
                                        " trajectories excluded (non-finite)");

  if (run.plot) {
    if (run.cfg.experiment == "lyapunov") {
      Series lam{"lambda(t)", {}, {}, false, false};
      for (const auto& r : series.rows) {
        lam.x.push_back(r.t);
        lam.y.push_back(r.lambda);
      }
      std::vector<Series> ss = {lam};
      try {
        const auto fit = analysis::fit_linear(lam.x, lam.y,
                                              analysis::FitWindow{3.0, lam.x.back()});
        Series overlay{"linear fit", {lam.x.front(), lam.x.back()}, {}, true, true};
        for (double x : overlay.x)
          overlay.y.push_back(fit.params.at("intercept") + fit.params.at("slope") * x);
        ss.push_back(overlay);
      } catch (const std::invalid_argument&) {
      }
      maybe_plot(run, name + ".svg",
                 {"Lyapunov estimate, g=" + g17(run.cfg.g), "t (kicks)", "lambda",
                  PlotKind::Scatter},
                 ss);
    } else {
      // linearized: a super-exponential OTOC is a straight line against t^2
      Series data{"ln C_cl", {}, {}, false, false};
      for (const auto& r : series.rows) {
        data.x.push_back(static_cast<double>(r.t) * r.t);
        data.y.push_back(r.log_Ccl);
      }
      maybe_plot(run, name + ".svg",
                 {"classical OTOC, g=" + g17(run.cfg.g), "t^2", "ln C_cl", PlotKind::Scatter},
                 {data});
    }
  }

  run.finish();
  std::ostringstream os;
  os << "wrote " << run.file(name) << " (" << series.rows.size() << " rows)";
  if (series.source_exhausted) os << "; kick source hit the basis edge";
  return {kExitOk, os.str(), run.result.files};
}

// ---- phase-portrait ----------------------------------------------------------

RunResult run_portrait(Run& run) {
  std::vector<int> times = run.cfg.portrait_times;
  if (times.empty()) times = {3, 5, 15};
  const auto frames = cls::phase_portrait(run.cfg, times);
  const std::string name = csv_name(run.cfg.experiment);
  {
    CsvWriter w(run.file(name), {"t", "theta", "p"});
    for (const auto& f : frames)
      for (std::size_t i = 0; i < f.theta.size(); ++i) {
        w.cell(f.t).cell(f.theta[i]).cell(f.p[i]);
        w.endrow();
      }
    w.close();
  }
  run.emitted(name);

  if (run.plot) {
    std::vector<Series> ss;
    for (const auto& f : frames)
      ss.push_back({"t=" + std::to_string(f.t), f.theta, f.p, false, false});
    maybe_plot(run, name + ".svg",
               {"phase portrait, g=" + g17(run.cfg.g), "theta", "p", PlotKind::Scatter}, ss);
  }

  run.finish();
  std::ostringstream os;
  os << "wrote " << run.file(name) << " (" << frames.size() << " snapshots)";
  return {kExitOk, os.str(), run.result.files};
}

// ---- scaling -----------------------------------------------------------------

RunResult run_scaling(Run& run) {
  std::vector<double> gs = run.cfg.g_list.empty() ? std::vector<double>{0.4, 0.5, 0.6}
                                                  : run.cfg.g_list;
  std::vector<int> ns = run.cfg.N_list.empty()
                            ? std::vector<int>{1 << 12, 1 << 13, 1 << 14, 1 << 15}
                            : run.cfg.N_list;
  const auto cells = otoc::scaling_sweep(gs, ns, run.cfg.t_star, run.cfg);

  const std::string name = csv_name(run.cfg.experiment);
  std::size_t rows = 0, exhausted = 0;
  {
    CsvWriter w(run.file(name), {"g", "N", "C_tstar", "ntilde"});
    for (const auto& c : cells) {
      if (c.exhausted) {
        ++exhausted;
        std::ostringstream os;
        os << "g=" << c.g << " N=" << c.N << ": basis exhausted before t*=" << run.cfg.t_star;
        run.manifest.guard_events.push_back(os.str());
        continue;
      }
      w.cell(c.g).cell(c.N).cell(c.C_tstar).cell(c.ntilde);
      w.endrow();
      ++rows;
    }
    w.close();
  }
  run.emitted(name);

  if (run.plot) {
    std::vector<Series> ss;
    for (double g : gs) {
      Series s{"g=" + g17(g), {}, {}, true, false};
      for (const auto& c : cells)
        if (c.g == g && !c.exhausted) {
          s.x.push_back(c.N);
          s.y.push_back(c.C_tstar);
        }
      if (!s.x.empty()) ss.push_back(s);
    }
    if (!ss.empty() && ss.front().x.size() >= 2) {
      Series ref{"slope 1", {}, {}, true, true};
      const double x0 = ss.front().x.front(), y0 = ss.front().y.front();
      for (double x : ss.front().x) {
        ref.x.push_back(x);
        ref.y.push_back(y0 * x / x0);
      }
      ss.push_back(ref);
    }
    maybe_plot(run, name + ".svg",
               {"C(t*) vs basis size, t*=" + std::to_string(run.cfg.t_star), "N", "C(t*)",
                PlotKind::LogLog},
               ss);
  }

  run.finish();
  std::ostringstream os;
  if (exhausted > 0) {
    os << exhausted << " of " << cells.size()
       << " cells truncated by the basis guard; partial results kept (" << rows << " rows)";
    return {kExitTruncated, os.str(), run.result.files};
  }
  os << "wrote " << run.file(name) << " (" << rows << " rows)";
  return {kExitOk, os.str(), run.result.files};
}

// ---- semiclassical -------------------------------------------------------------

RunResult run_semiclassical(Run& run) {
  const auto series = cls::semiclassical_compare(run.cfg, run.cfg.t_max);
  const std::string name = csv_name(run.cfg.experiment);
  {
    CsvWriter w(run.file(name), {"t", "C", "hbar2_Ccl"});
    for (const auto& r : series.rows) {
      w.cell(r.t).cell(r.C).cell(r.hbar2_Ccl);
      w.endrow();
    }
    w.close();
  }
  run.emitted(name);

  if (run.plot && !series.rows.empty()) {
    Series q{"C(t)", {}, {}, true, false}, c{"hbar^2 C_cl(t)", {}, {}, true, false};
    for (const auto& r : series.rows) {
      q.x.push_back(r.t);
      q.y.push_back(r.C);
      c.x.push_back(r.t);
      c.y.push_back(r.hbar2_Ccl);
    }
    maybe_plot(run, name + ".svg",
               {"semiclassical correspondence, hbar=" + g17(run.cfg.hbar), "t (kicks)", "OTOC",
                PlotKind::LogLinear},
               {q, c});
  }

  if (series.truncated) {
    std::ostringstream os;
    os << "quantum side truncated at t*=" << series.truncated_at << "; partial results kept ("
       << series.rows.size() << " rows)";
    run.manifest.guard_events.push_back(os.str());
    run.finish();
    return {kExitTruncated, os.str(), run.result.files};
  }
  run.finish();
  std::ostringstream os;
  os << "wrote " << run.file(name) << " (" << series.rows.size() << " rows)";
  return {kExitOk, os.str(), run.result.files};
}

// ---- echo-trace -----------------------------------------------------------------

RunResult run_echo_trace(Run& run) {
  const auto tr = otoc::energy_trace_experiment(run.cfg, run.cfg.t_star);
  const std::string name = csv_name(run.cfg.experiment);
  {
    CsvWriter w(run.file(name), {"leg", "t", "energy", "norm"});
    for (std::size_t i = 0; i < tr.forward_energy.size(); ++i) {
      w.cell(std::string("forward")).cell(static_cast<int>(i)).cell(tr.forward_energy[i]).cell(
          tr.forward_norm[i]);
      w.endrow();
    }
    for (std::size_t i = 0; i < tr.backward_energy.size(); ++i) {
      w.cell(std::string("backward")).cell(static_cast<int>(i)).cell(tr.backward_energy[i]).cell(
          tr.backward_norm[i]);
      w.endrow();
    }
    w.close();
  }
  run.emitted(name);
  run.manifest.notes["e_tilde"] = tr.e_tilde;
  run.manifest.notes["n_tilde"] = tr.n_tilde;
  run.manifest.notes["norm_tilde"] = tr.norm_tilde;

  if (run.plot) {
    Series f{"forward <p^2>", {}, {}, true, false}, b{"backward <p^2>", {}, {}, true, false};
    for (std::size_t i = 0; i < tr.forward_energy.size(); ++i) {
      f.x.push_back(static_cast<double>(i));
      f.y.push_back(tr.forward_energy[i]);
    }
    for (std::size_t i = 0; i < tr.backward_energy.size(); ++i) {
      b.x.push_back(static_cast<double>(i));
      b.y.push_back(tr.backward_energy[i]);
    }
    maybe_plot(run, name + ".svg",
               {"echo energy trace, t*=" + std::to_string(run.cfg.t_star), "kicks into leg",
                "<p^2>", PlotKind::LogLinear},
               {f, b});
  }

  if (tr.truncated) {
    std::ostringstream os;
    os << "guard truncated at step " << tr.truncated_at << "; partial results kept";
    run.manifest.guard_events.push_back(os.str());
    run.finish();
    return {kExitTruncated, os.str(), run.result.files};
  }
  run.finish();
  std::ostringstream os;
  os << "wrote " << run.file(name);
  return {kExitOk, os.str(), run.result.files};
}

// ---- fit -------------------------------------------------------------------------

nlohmann::json fit_to_json(const analysis::FitResult& fr) {
  nlohmann::json j;
  j["params"] = fr.params;
  j["stderrs"] = fr.stderrs;
  j["covariance"] = fr.covariance;
  j["r_squared"] = fr.r_squared;
  j["window"] = {{"lo", fr.window.lo}, {"hi", fr.window.hi}};
  j["n_points"] = fr.n_points;
  j["flags"] = fr.flags;
  return j;
}

RunResult run_fit(Run& run) {
  const auto& cfg = run.cfg;
  if (cfg.input_csv.empty() || cfg.fit_model.empty() || cfg.x_col.empty() || cfg.y_col.empty())
    throw std::invalid_argument(
        "fit needs input_csv, fit_model, x_col and y_col in the config");

  CsvTable table;
  try {
    table = read_csv(cfg.input_csv);
  } catch (const std::runtime_error& e) {
    throw std::invalid_argument(e.what());  // bad input file is a parameter problem
  }
  std::vector<double> x, y;
  try {
    x = table.numeric(cfg.x_col);
    y = table.numeric(cfg.y_col);
  } catch (const std::runtime_error& e) {
    throw std::invalid_argument(e.what());
  }

  analysis::FitResult fr;
  PlotKind kind = PlotKind::Scatter;
  if (cfg.fit_model == "linear") {
    fr = analysis::fit_linear(x, y);
  } else if (cfg.fit_model == "exponential") {
    fr = analysis::fit_exponential_rate(x, y);
    kind = PlotKind::LogLinear;
  } else if (cfg.fit_model == "quadratic") {
    // y is read as lnC; knowing gamma splits out eta = c/gamma
    fr = analysis::fit_super_exponential(x, y, std::nullopt,
                                         analysis::gamma_theory(cfg.g, cfg.hbar, 1.0), cfg.g,
                                         cfg.hbar);
  } else if (cfg.fit_model == "power-law") {
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (!(x[i] > 0.0) || !(y[i] > 0.0))
        throw std::invalid_argument("power-law fit needs positive x and y everywhere");
      lx.push_back(std::log(x[i]));
      ly.push_back(std::log(y[i]));
    }
    fr = analysis::fit_linear(lx, ly);
    fr.params["exponent"] = fr.params.at("slope");
    fr.stderrs["exponent"] = fr.stderrs.at("slope");
    kind = PlotKind::LogLog;
  } else if (cfg.fit_model == "localization") {
    std::vector<double> ax, ly;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (!(y[i] > 0.0))
        throw std::invalid_argument("localization fit needs positive y everywhere");
      ax.push_back(std::abs(x[i]));
      ly.push_back(std::log(y[i]));
    }
    fr = analysis::fit_linear(ax, ly);
    const double slope = fr.params.at("slope");
    fr.params["xi"] = slope < 0.0 ? -1.0 / slope : std::numeric_limits<double>::infinity();
    if (!(slope < 0.0)) fr.flags.push_back("divergent");
    kind = PlotKind::LogLinear;
  } else {
    throw std::invalid_argument(
        "fit_model must be linear, exponential, quadratic, power-law or localization (got '" +
        cfg.fit_model + "')");
  }

  nlohmann::json j = fit_to_json(fr);
  j["model"] = cfg.fit_model;
  j["input_csv"] = cfg.input_csv;
  j["x_col"] = cfg.x_col;
  j["y_col"] = cfg.y_col;
  {
    std::ofstream out(run.file("fit.json"), std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + run.file("fit.json") + "' for writing");
    out << j.dump(2) << '\n';
    if (!out) throw std::runtime_error("write failed for '" + run.file("fit.json") + "'");
  }
  run.emitted("fit.json");

  if (run.plot) {
    Series data{cfg.y_col, x, y, false, false};
    maybe_plot(run, "fit.svg", {"fit: " + cfg.fit_model, cfg.x_col, cfg.y_col, kind}, {data});
  }

  run.finish();
  std::ostringstream os;
  os << "wrote " << run.file("fit.json") << " (model " << cfg.fit_model << ", r^2 "
     << fr.r_squared << ")";
  return {kExitOk, os.str(), run.result.files};
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& cfg, bool plot) {
  const auto& names = experiment_names();
  if (std::find(names.begin(), names.end(), cfg.experiment) == names.end()) {
    std::string known;
    for (const auto& n : names) known += (known.empty() ? "" : ", ") + n;
    return {kExitUnknownExperiment,
            "unknown experiment '" + cfg.experiment + "' (known: " + known + ")",
            {}};
  }
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    return {kExitConfig, e.what(), {}};
  }
  std::error_code ec;
  fs::create_directories(cfg.output_dir, ec);
  if (ec || !fs::is_directory(cfg.output_dir))
    return {kExitIo, "cannot create output directory '" + cfg.output_dir + "'", {}};

  try {
    Run run(cfg, plot);
    if (cfg.experiment == "quantum-otoc")
      return run_quantum(run, otoc::PerturbationKind::MomentumOp);
    if (cfg.experiment == "theta-otoc") return run_quantum(run, otoc::PerturbationKind::AngleOp);
    if (cfg.experiment == "classical-otoc" || cfg.experiment == "lyapunov")
      return run_classical(run);
    if (cfg.experiment == "phase-portrait") return run_portrait(run);
    if (cfg.experiment == "scaling") return run_scaling(run);
    if (cfg.experiment == "semiclassical") return run_semiclassical(run);
    if (cfg.experiment == "echo-trace") return run_echo_trace(run);
    return run_fit(run);
  } catch (const std::invalid_argument& e) {
    return {kExitConfig, e.what(), {}};
  } catch (const std::exception& e) {
    return {kExitIo, e.what(), {}};
  }
}

RunResult plot_csv_file(const std::string& csv_path, const std::string& kind,
                        const std::string& out_path, const std::string& x_col,
                        const std::vector<std::string>& y_cols) {
  PlotKind pk;
  try {
    pk = plot_kind_from_string(kind);
  } catch (const std::invalid_argument& e) {
    return {kExitConfig, e.what(), {}};
  }
  CsvTable table;
  try {
    table = read_csv(csv_path);
  } catch (const std::runtime_error& e) {
    return {kExitConfig, e.what(), {}};
  }
  if (table.rows.empty()) return {kExitConfig, "csv '" + csv_path + "' has no data rows", {}};

  const std::string xc = x_col.empty() ? table.columns.front() : x_col;
  std::vector<std::string> ycs = y_cols;
  if (ycs.empty()) {
    for (const auto& c : table.columns)
      if (c != xc) ycs.push_back(c);
  }
  try {
    const auto xs = table.numeric(xc);
    std::vector<Series> ss;
    for (const auto& yc : ycs) ss.push_back({yc, xs, table.numeric(yc), true, false});
    write_plot(out_path, {fs::path(csv_path).filename().string(), xc, "", pk}, ss);
  } catch (const std::runtime_error& e) {
    return {kExitConfig, e.what(), {}};
  } catch (const std::invalid_argument& e) {
    return {kExitConfig, e.what(), {}};
  }
  return {kExitOk, "wrote " + out_path, {out_path}};
}

}  // namespace otoclab::io
