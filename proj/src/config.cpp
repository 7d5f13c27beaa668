#include "otoclab/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace otoclab {

std::string to_string(KickSource k) {
  return k == KickSource::QuantumMeanField ? "quantum-mean-field" : "ensemble-density";
}

KickSource kick_source_from_string(const std::string& s) {
  if (s == "quantum-mean-field") return KickSource::QuantumMeanField;
  if (s == "ensemble-density") return KickSource::EnsembleDensity;
  throw std::invalid_argument("kick_source must be quantum-mean-field or ensemble-density (got '" + s + "')");
}

void ExperimentConfig::validate() const {
  if (N < 8 || N % 2 != 0) {
    std::ostringstream os;
    os << "N must be even and >= 8 (got " << N << ")";
    throw std::invalid_argument(os.str());
  }
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v))
      throw std::invalid_argument(std::string(name) + " must be positive and finite");
  };
  positive(hbar, "hbar");
  positive(sigma, "sigma");
  positive(delta_theta0, "delta_theta0");
  positive(edge_mass_threshold, "edge_mass_threshold");
  positive(norm_drift_threshold, "norm_drift_threshold");
  positive(density_bandwidth, "density_bandwidth");
  if (!std::isfinite(g)) throw std::invalid_argument("g must be finite");
  if (t_max < 1) throw std::invalid_argument("t_max must be >= 1");
  if (t_star < 1) throw std::invalid_argument("t_star must be >= 1");
  if (ensemble_size < 1) throw std::invalid_argument("ensemble_size must be >= 1");
  for (int n : N_list) {
    if (n < 8 || n % 2 != 0) {
      std::ostringstream os;
      os << "N_list entries must be even and >= 8 (got " << n << ")";
      throw std::invalid_argument(os.str());
    }
  }
  for (int t : portrait_times)
    if (t < 0) throw std::invalid_argument("portrait times must be >= 0");
}

nlohmann::json config_to_json(const ExperimentConfig& c) {
  nlohmann::json j{
      {"experiment", c.experiment},
      {"hbar", c.hbar},
      {"g", c.g},
      {"sigma", c.sigma},
      {"N", c.N},
      {"t_max", c.t_max},
      {"t_star", c.t_star},
      {"ensemble_size", c.ensemble_size},
      {"delta_theta0", c.delta_theta0},
      {"seed", c.seed},
      {"kick_source", to_string(c.kick_source)},
      {"output_dir", c.output_dir},
      {"edge_mass_threshold", c.edge_mass_threshold},
      {"norm_drift_threshold", c.norm_drift_threshold},
      {"density_bandwidth", c.density_bandwidth},
  };
  if (!c.g_list.empty()) j["g_list"] = c.g_list;
  if (!c.N_list.empty()) j["N_list"] = c.N_list;
  if (!c.portrait_times.empty()) j["portrait_times"] = c.portrait_times;
  if (!c.input_csv.empty()) j["input_csv"] = c.input_csv;
  if (!c.fit_model.empty()) j["fit_model"] = c.fit_model;
  if (!c.x_col.empty()) j["x_col"] = c.x_col;
  if (!c.y_col.empty()) j["y_col"] = c.y_col;
  return j;
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig c;
  auto get = [&j](const char* key, auto& slot) {
    if (j.contains(key)) slot = j.at(key).get<std::remove_reference_t<decltype(slot)>>();
  };
  get("experiment", c.experiment);
  get("hbar", c.hbar);
  get("g", c.g);
  get("sigma", c.sigma);
  get("N", c.N);
  get("t_max", c.t_max);
  get("t_star", c.t_star);
  get("ensemble_size", c.ensemble_size);
  get("delta_theta0", c.delta_theta0);
  get("seed", c.seed);
  get("output_dir", c.output_dir);
  get("edge_mass_threshold", c.edge_mass_threshold);
  get("norm_drift_threshold", c.norm_drift_threshold);
  get("density_bandwidth", c.density_bandwidth);
  get("g_list", c.g_list);
  get("N_list", c.N_list);
  get("portrait_times", c.portrait_times);
  get("input_csv", c.input_csv);
  get("fit_model", c.fit_model);
  get("x_col", c.x_col);
  get("y_col", c.y_col);
  if (j.contains("kick_source"))
    c.kick_source = kick_source_from_string(j.at("kick_source").get<std::string>());
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("config '" + path + "' is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

void apply_override(ExperimentConfig& c, const std::string& key, const std::string& value) {
  nlohmann::json j = config_to_json(c);
  nlohmann::json v;
  try {
    v = nlohmann::json::parse(value);
  } catch (const nlohmann::json::exception&) {
    v = value;  // bare strings allowed: --set experiment=scaling
  }
  j[key] = v;
  try {
    c = config_from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("--set " + key + "=" + value + ": " + e.what());
  }
}

}  // namespace otoclab
