#pragma once
// Named, reproducible experiment runs. Each experiment writes its series CSV
// (fixed schema, 17 significant digits), a manifest JSON with config echo and
// file checksums, and optional SVG plots. Exit codes, also used by the CLI:
//   0  success
//   1  invalid parameters: bad config values, bad --set, bad fit inputs
//   2  guard-truncated run; partial results are kept on disk
//   3  I/O failure: unwritable output directory, failed write
//   4  unknown experiment name

#include <string>
#include <vector>

#include "otoclab/config.hpp"

namespace otoclab::io {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitTruncated = 2;
inline constexpr int kExitIo = 3;
inline constexpr int kExitUnknownExperiment = 4;

const std::vector<std::string>& experiment_names();

struct RunResult {
  int exit_code = kExitOk;
  std::string message;             // one-line outcome, printed by the CLI
  std::vector<std::string> files;  // artifacts, relative to output_dir
};

// Never throws; every failure maps to an exit code and one-line message.
RunResult run_experiment(const ExperimentConfig& cfg, bool plot);

// The standalone `plot` command: CSV in, SVG out. Empty x_col means the first
// column; empty y_cols means every other column as its own series.
RunResult plot_csv_file(const std::string& csv_path, const std::string& kind,
                        const std::string& out_path, const std::string& x_col,
                        const std::vector<std::string>& y_cols);

}  // namespace otoclab::io
