#pragma once
// One JSON document fully describes a run; CLI --set overrides individual
// keys. Seed + config determine every numeric output.

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace otoclab {

enum class KickSource { QuantumMeanField, EnsembleDensity };

std::string to_string(KickSource k);
KickSource kick_source_from_string(const std::string& s);

struct ExperimentConfig {
  std::string experiment;
  double hbar = 0.6;
  double g = 1.5;
  double sigma = 1.0;
  int N = 1 << 14;
  int t_max = 12;
  int t_star = 7;
  int ensemble_size = 10000;
  double delta_theta0 = 1e-5;
  std::uint64_t seed = 20260814ull;
  KickSource kick_source = KickSource::QuantumMeanField;
  std::string output_dir = "out";

  double edge_mass_threshold = 1e-8;
  double norm_drift_threshold = 1e-9;

  // sweep / portrait extras (empty means experiment defaults)
  std::vector<double> g_list;
  std::vector<int> N_list;
  std::vector<int> portrait_times;

  // EnsembleDensity estimator
  double density_bandwidth = 0.05;

  // `fit` experiment inputs
  std::string input_csv;
  std::string fit_model;  // linear | exponential | quadratic | power-law | localization
  std::string x_col;
  std::string y_col;

  // throws std::invalid_argument naming the violated invariant
  void validate() const;
};

nlohmann::json config_to_json(const ExperimentConfig& c);
ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);

// key=value override; value parsed as JSON when possible, else taken as string
void apply_override(ExperimentConfig& c, const std::string& key, const std::string& value);

}  // namespace otoclab
