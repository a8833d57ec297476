#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace specproj {

// Model description as it appears in config files.
//   kind "spiked":        p, spikes (descending s values), sigma, basis_seed
//   kind "sparse-spiked": p, spikes[0], sigma, k (support size)
//   kind "explicit":      values (descending), multiplicities, basis_seed
//   kind "identity":      p
struct ModelSpec {
  std::string kind = "spiked";
  int p = 50;
  std::vector<double> spikes = {2.0};
  double sigma = 1.0;
  std::vector<double> values;
  std::vector<int> multiplicities;
  int k = 5;
  std::optional<std::uint64_t> basis_seed;
};

// Probe direction, one of: "theta" (target eigenvector), "noise" (first
// coordinate inside the bottom cluster), "e<j>" (1-based coordinate vector),
// "file:<path>" (CSV vector).
struct DirectionSpec {
  std::string u = "theta";
  std::string v = "noise";
};

// Full run description. Every field has a default (echoed back by
// emit_config); only "command" is always required, "data" additionally for
// the estimate / decompose commands.
struct RunConfig {
  std::string command;
  ModelSpec model;
  int n = 1000;
  int R = 2000;
  std::uint64_t seed = 1;
  int r = 1;                       // target cluster (1-based)
  int j = 1;                       // spike index for verify-risk
  std::string mode;                // verify-clt: projector|eigenvector|linear
                                   // verify-bias: decomposition|estimator
  std::vector<DirectionSpec> directions = {DirectionSpec{}};
  std::vector<int> p_grid = {10, 20, 50, 100};  // verify-norm
  std::vector<int> n_values = {500, 2000};      // verify-bias estimator mode
  double t = 3.0;
  double c_gamma = 0.0;            // recover: 0 means calibrate, then freeze
  double cluster_tol = 1e-8;
  int nodes = 64;
  int oracle_R = 5000;
  std::vector<int> sweep_n = {1000, 2000, 4000};
  int sweep_R = 200;
  int calibration_R = 600;
  std::string data;                // input CSV for estimate / decompose
  std::string out = "out";
};

// Strict parse: unknown keys, type mismatches and missing required fields are
// all reported with the offending field named. Defaults are filled in.
RunConfig parse_config(const std::string& text);
RunConfig parse_config_json(const nlohmann::json& j);

// Canonical full-fidelity echo; parse(emit(c)) == c.
nlohmann::json emit_config(const RunConfig& c);

}  // namespace specproj
