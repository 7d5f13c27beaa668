// otoclab: run a named experiment from a JSON config, or plot an emitted CSV.
//
//   otoclab <experiment> [--config file.json] [--set key=value]... [--plot]
//   otoclab plot --csv file.csv [--kind log-linear|log-log|scatter]
//                [--out file.svg] [--x col] [--y col]...
//
// OTOCLAB_THREADS caps the worker count (results are identical either way).

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "otoclab/config.hpp"
#include "otoclab/experiments.hpp"
#include "otoclab/kernels.hpp"
#include "otoclab/version.hpp"

int main(int argc, char** argv) {
  using namespace otoclab;
  if (const int t = kernels::threads_from_env(); t > 0) kernels::set_threads(t);

  CLI::App app{"kicked mean-field scrambling experiments"};
  app.set_version_flag("--version", kVersion);

  std::string command;
  std::string known;
  for (const auto& n : io::experiment_names()) known += (known.empty() ? "" : " | ") + n;
  app.add_option("experiment", command, "one of: " + known + " | plot")->required();

  std::string config_path;
  app.add_option("--config", config_path, "JSON config file (defaults apply when omitted)");
  std::vector<std::string> overrides;
  app.add_option("--set", overrides, "key=value config override, repeatable");
  bool do_plot = false;
  app.add_flag("--plot", do_plot, "also emit SVG plots");

  std::string csv, kind = "log-linear", out, x_col;
  std::vector<std::string> y_cols;
  app.add_option("--csv", csv, "plot: input CSV");
  app.add_option("--kind", kind, "plot: log-linear | log-log | scatter");
  app.add_option("--out", out, "plot: output SVG (default: CSV path with .svg)");
  app.add_option("--x", x_col, "plot: x column (default: first)");
  app.add_option("--y", y_cols, "plot: y columns (default: all others)");

  CLI11_PARSE(app, argc, argv);

  if (command == "plot") {
    if (csv.empty()) {
      std::cerr << "error: plot needs --csv\n";
      return io::kExitConfig;
    }
    if (out.empty()) {
      out = csv;
      const auto dot = out.find_last_of('.');
      if (dot != std::string::npos) out.resize(dot);
      out += ".svg";
    }
    const auto r = io::plot_csv_file(csv, kind, out, x_col, y_cols);
    (r.exit_code == io::kExitOk ? std::cout : std::cerr) << r.message << '\n';
    return r.exit_code;
  }

  ExperimentConfig cfg;
  try {
    if (!config_path.empty()) cfg = load_config(config_path);
    cfg.experiment = command;
    for (const auto& kv : overrides) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos || eq == 0)
        throw std::invalid_argument("--set expects key=value (got '" + kv + "')");
      apply_override(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return io::kExitConfig;
  }

  const auto r = io::run_experiment(cfg, do_plot);
  (r.exit_code == io::kExitOk ? std::cout : std::cerr) << r.message << '\n';
  return r.exit_code;
}
