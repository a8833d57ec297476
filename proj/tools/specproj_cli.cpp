// Command-line front end: configuration-driven experiment runner and
// estimator for spectral projectors of sample covariance operators.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "specproj/runner.hpp"

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spectral projector experiments for sample covariance operators"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::string data_path;
  std::uint64_t seed = 0;
  bool have_seed = false;
  bool quiet = false;

  const std::vector<std::string> commands = {"verify-norm", "verify-remainder",
                                             "verify-clt",  "verify-bias",
                                             "verify-risk", "recover",
                                             "estimate",    "decompose"};
  for (const std::string& name : commands) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "JSON config file");
    sub->add_option("--seed", seed, "seed override")->each([&](const std::string&) {
      have_seed = true;
    });
    sub->add_option("--out", out_dir, "output directory override");
    sub->add_option("--data", data_path, "input CSV (estimate / decompose)");
    sub->add_flag("--quiet", quiet, "suppress the human summary");
  }

  CLI11_PARSE(app, argc, argv);

  try {
    nlohmann::json j = nlohmann::json::object();
    if (!config_path.empty()) {
      j = nlohmann::json::parse(slurp(config_path));
      if (!j.is_object()) throw std::invalid_argument("config: top level must be an object");
    }
    j["command"] = app.get_subcommands().front()->get_name();
    if (!data_path.empty()) j["data"] = data_path;

    specproj::RunConfig cfg = specproj::parse_config_json(j);
    if (have_seed) cfg.seed = seed;
    if (!out_dir.empty()) cfg.out = out_dir;

    return specproj::run_command(cfg, std::cout, std::cerr, quiet);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
