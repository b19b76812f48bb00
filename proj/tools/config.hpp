#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <yaml-cpp/yaml.h>

namespace bregret::cli {

// A configuration problem, reported with the offending file line when known.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Unit { Nats, Bits };

struct GridConfig {
  // "sweep": [delta, 1 - delta] with `step`; "uniform": `points` evenly spaced
  // on [lo, hi]; "explicit": `values`, one entry per point.
  std::string kind = "sweep";
  double step = 0.01;
  int points = 0;
  double lo = 0.0;
  double hi = 1.0;
  std::vector<std::vector<double>> values;
};

struct PriorConfig {
  // "uniform", "point" (`index`) and "explicit" (`weights`) live on the grid;
  // "dirichlet" carries its own Gauss-Jacobi grid of `size` points.
  std::string kind = "uniform";
  double beta = 1.0;
  int size = 64;
  int index = 0;
  std::vector<double> weights;
};

struct PredictorConfig {
  std::string kind = "add_beta";  // add_beta | mixture | alpha_nml
  double beta = 0.5;
  double alpha = 2.0;
};

struct ExperimentConfig {
  int n = 1;
  int ell = 1;
  std::optional<double> gamma;  // ell = round(n^gamma) when set
  int alphabet_size = 2;
  double delta = 0.1;

  GridConfig grid;
  PriorConfig prior;
  PredictorConfig predictor;

  double alpha = 1.0;
  std::vector<double> alphas = {1, 2, 4, 8, 16, 32, 64, 128, 256};
  std::vector<double> theta = {0.5, 0.5};

  double tol = 1e-7;
  int max_iter = 100000;

  std::vector<int> n_values = {4, 8, 16, 32};
  std::vector<int> audit_n;
  // Capacity on successively finer sweep grids of [delta, 1 - delta].
  std::vector<double> refine;

  // Execution settings; not echoed into outputs.
  std::string output;
  Unit unit = Unit::Nats;
  unsigned workers = 1;

  int ell_for(int n_value) const;
};

// Parses YAML text; `overrides` are "dotted.key=value" strings applied on top.
ExperimentConfig load_config(const std::string& yaml_text, const std::vector<std::string>& overrides = {});
ExperimentConfig load_config_file(const std::string& path, const std::vector<std::string>& overrides = {});

Unit parse_unit(const std::string& text);

// Experiment parameters as YAML lines, for provenance headers.
std::vector<std::string> describe(const ExperimentConfig& config);

}  // namespace bregret::cli
