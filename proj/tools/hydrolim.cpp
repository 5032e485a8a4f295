#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "hydrolim/experiments.hpp"

int main(int argc, char** argv) {
  using namespace hydrolim;
  CLI::App app{"Hydrodynamic-limit verification experiments"};
  std::string experiment, config_path, out_dir = ".";
  std::uint64_t seed = 0;
  std::string names;
  for (const auto& n : experiment_names()) names += (names.empty() ? "" : ", ") + n;
  app.add_option("experiment", experiment, "one of: " + names)->required();
  app.add_option("--config", config_path, "JSON configuration file");
  auto* seed_opt = app.add_option("--seed", seed, "overrides the configured seed");
  app.add_option("--out", out_dir, "output directory");
  CLI11_PARSE(app, argc, argv);

  try {
    Json config = Json::object();
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw ConfigError("cannot open config file " + config_path);
      try {
        config = Json::parse(in);
      } catch (const Json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
      }
    }
    if (*seed_opt) config["seed"] = seed;
    if (!config_path.empty() && !app.get_option("--out")->count() && config.contains("output")) {
      if (!config["output"].is_string()) throw ConfigError("'output' must be a string");
      out_dir = config["output"];
    }
    ExperimentReport report = run_experiment(experiment, config);
    for (const auto& path : write_report(report, config, out_dir))
      std::cout << "wrote " << path.string() << '\n';
    for (const auto& c : report.checks)
      std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << " = " << c.value << " (" << c.target
                << ")\n";
    std::cout << (report.passed() ? "PASS" : "FAIL") << ' ' << experiment << " ("
              << report.runtime_seconds << " s)\n";
    return report.passed() ? 0 : 1;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
