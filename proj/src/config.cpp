#include "specproj/config.hpp"

#include <set>
#include <stdexcept>

namespace specproj {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw std::invalid_argument("config: field '" + where + "': " + what);
}

void check_keys(const json& j, const std::string& where,
                const std::set<std::string>& allowed) {
  for (const auto& item : j.items()) {
    if (!allowed.count(item.key())) {
      fail(where.empty() ? item.key() : where + "." + item.key(), "unknown key");
    }
  }
}

double get_number(const json& j, const std::string& where) {
  if (!j.is_number()) fail(where, "expected a number");
  return j.get<double>();
}

int get_int(const json& j, const std::string& where) {
  if (!j.is_number_integer()) fail(where, "expected an integer");
  return j.get<int>();
}

std::uint64_t get_u64(const json& j, const std::string& where) {
  if (!j.is_number_unsigned() && !j.is_number_integer()) fail(where, "expected an integer");
  if (j.is_number_integer() && j.get<long long>() < 0) fail(where, "expected a nonnegative integer");
  return j.get<std::uint64_t>();
}

std::string get_string(const json& j, const std::string& where) {
  if (!j.is_string()) fail(where, "expected a string");
  return j.get<std::string>();
}

std::vector<double> get_double_list(const json& j, const std::string& where) {
  if (!j.is_array()) fail(where, "expected an array of numbers");
  std::vector<double> out;
  for (const auto& x : j) {
    if (!x.is_number()) fail(where, "expected an array of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

std::vector<int> get_int_list(const json& j, const std::string& where) {
  if (!j.is_array()) fail(where, "expected an array of integers");
  std::vector<int> out;
  for (const auto& x : j) {
    if (!x.is_number_integer()) fail(where, "expected an array of integers");
    out.push_back(x.get<int>());
  }
  return out;
}

ModelSpec parse_model(const json& j) {
  if (!j.is_object()) fail("model", "expected an object");
  check_keys(j, "model",
             {"kind", "p", "spikes", "sigma", "values", "multiplicities", "k",
              "basis_seed"});
  ModelSpec m;
  if (j.contains("kind")) m.kind = get_string(j["kind"], "model.kind");
  if (m.kind != "spiked" && m.kind != "sparse-spiked" && m.kind != "explicit" &&
      m.kind != "identity") {
    fail("model.kind", "must be spiked, sparse-spiked, explicit or identity");
  }
  if (j.contains("p")) m.p = get_int(j["p"], "model.p");
  if (j.contains("spikes")) m.spikes = get_double_list(j["spikes"], "model.spikes");
  if (j.contains("sigma")) m.sigma = get_number(j["sigma"], "model.sigma");
  if (j.contains("values")) m.values = get_double_list(j["values"], "model.values");
  if (j.contains("multiplicities")) {
    m.multiplicities = get_int_list(j["multiplicities"], "model.multiplicities");
  }
  if (j.contains("k")) m.k = get_int(j["k"], "model.k");
  if (j.contains("basis_seed") && !j["basis_seed"].is_null()) {
    m.basis_seed = get_u64(j["basis_seed"], "model.basis_seed");
  }
  return m;
}

std::vector<DirectionSpec> parse_directions(const json& j) {
  if (!j.is_array()) fail("directions", "expected an array of {u, v} objects");
  std::vector<DirectionSpec> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string where = "directions[" + std::to_string(i) + "]";
    if (!j[i].is_object()) fail(where, "expected an object");
    check_keys(j[i], where, {"u", "v"});
    DirectionSpec d;
    if (j[i].contains("u")) d.u = get_string(j[i]["u"], where + ".u");
    if (j[i].contains("v")) d.v = get_string(j[i]["v"], where + ".v");
    out.push_back(std::move(d));
  }
  if (out.empty()) fail("directions", "must not be empty");
  return out;
}

const std::set<std::string> kCommands = {"verify-norm", "verify-remainder", "verify-clt",
                                         "verify-bias", "verify-risk", "recover",
                                         "estimate", "decompose"};

}  // namespace

RunConfig parse_config_json(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("config: top level must be an object");
  check_keys(j, "",
             {"command", "model", "n", "R", "seed", "r", "j", "mode", "directions",
              "p_grid", "n_values", "t", "c_gamma", "cluster_tol", "nodes", "oracle_R",
              "sweep_n", "sweep_R", "calibration_R", "data", "out"});

  RunConfig c;
  if (!j.contains("command")) fail("command", "missing required field");
  c.command = get_string(j["command"], "command");
  if (!kCommands.count(c.command)) fail("command", "unknown command '" + c.command + "'");

  if (j.contains("model")) c.model = parse_model(j["model"]);
  if (j.contains("n")) c.n = get_int(j["n"], "n");
  if (j.contains("R")) c.R = get_int(j["R"], "R");
  if (j.contains("seed")) c.seed = get_u64(j["seed"], "seed");
  if (j.contains("r")) c.r = get_int(j["r"], "r");
  if (j.contains("j")) c.j = get_int(j["j"], "j");
  if (j.contains("mode")) c.mode = get_string(j["mode"], "mode");
  if (j.contains("directions")) c.directions = parse_directions(j["directions"]);
  if (j.contains("p_grid")) c.p_grid = get_int_list(j["p_grid"], "p_grid");
  if (j.contains("n_values")) c.n_values = get_int_list(j["n_values"], "n_values");
  if (j.contains("t")) c.t = get_number(j["t"], "t");
  if (j.contains("c_gamma")) c.c_gamma = get_number(j["c_gamma"], "c_gamma");
  if (j.contains("cluster_tol")) c.cluster_tol = get_number(j["cluster_tol"], "cluster_tol");
  if (j.contains("nodes")) c.nodes = get_int(j["nodes"], "nodes");
  if (j.contains("oracle_R")) c.oracle_R = get_int(j["oracle_R"], "oracle_R");
  if (j.contains("sweep_n")) c.sweep_n = get_int_list(j["sweep_n"], "sweep_n");
  if (j.contains("sweep_R")) c.sweep_R = get_int(j["sweep_R"], "sweep_R");
  if (j.contains("calibration_R")) c.calibration_R = get_int(j["calibration_R"], "calibration_R");
  if (j.contains("data")) c.data = get_string(j["data"], "data");
  if (j.contains("out")) c.out = get_string(j["out"], "out");

  // Per-command defaults and requirements.
  if (c.mode.empty()) {
    if (c.command == "verify-clt") c.mode = "projector";
    if (c.command == "verify-bias") c.mode = "decomposition";
  }
  if (c.command == "verify-clt" && c.mode != "projector" && c.mode != "eigenvector" &&
      c.mode != "linear") {
    fail("mode", "verify-clt mode must be projector, eigenvector or linear");
  }
  if (c.command == "verify-bias" && c.mode != "decomposition" && c.mode != "estimator") {
    fail("mode", "verify-bias mode must be decomposition or estimator");
  }
  if ((c.command == "estimate" || c.command == "decompose") && c.data.empty()) {
    fail("data", "missing required field for command '" + c.command + "'");
  }
  if (c.command == "verify-norm" && !j.contains("model")) {
    c.model.kind = "identity";
  }
  if (c.command == "recover" && !j.contains("model")) {
    c.model.kind = "sparse-spiked";
    c.model.p = 200;
    c.model.k = 5;
    c.model.spikes = {2.0};
    c.model.sigma = 1.0;
    c.n = j.contains("n") ? c.n : 2000;
  }
  if (c.n < 1) fail("n", "must be at least 1");
  if (c.R < 1) fail("R", "must be at least 1");
  if (c.nodes < 8) fail("nodes", "must be at least 8");
  if (c.cluster_tol < 0.0) fail("cluster_tol", "must be nonnegative");
  return c;
}

RunConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config: invalid JSON: ") + e.what());
  }
  return parse_config_json(j);
}

nlohmann::json emit_config(const RunConfig& c) {
  json model{{"kind", c.model.kind},
             {"p", c.model.p},
             {"spikes", c.model.spikes},
             {"sigma", c.model.sigma},
             {"values", c.model.values},
             {"multiplicities", c.model.multiplicities},
             {"k", c.model.k},
             {"basis_seed", c.model.basis_seed.has_value() ? json(*c.model.basis_seed)
                                                           : json(nullptr)}};
  json dirs = json::array();
  for (const DirectionSpec& d : c.directions) dirs.push_back({{"u", d.u}, {"v", d.v}});
  return json{{"command", c.command},
              {"model", model},
              {"n", c.n},
              {"R", c.R},
              {"seed", c.seed},
              {"r", c.r},
              {"j", c.j},
              {"mode", c.mode},
              {"directions", dirs},
              {"p_grid", c.p_grid},
              {"n_values", c.n_values},
              {"t", c.t},
              {"c_gamma", c.c_gamma},
              {"cluster_tol", c.cluster_tol},
              {"nodes", c.nodes},
              {"oracle_R", c.oracle_R},
              {"sweep_n", c.sweep_n},
              {"sweep_R", c.sweep_R},
              {"calibration_R", c.calibration_R},
              {"data", c.data},
              {"out", c.out}};
}

}  // namespace specproj
