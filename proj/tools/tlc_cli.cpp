#include <cstdint>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "tlc/experiments.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Quasi-dynamic traffic light control testbed"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::string mode;
  std::uint64_t seed = 0;
  auto* config_opt = app.add_option("--config", config_path, "JSON experiment config");
  auto* seed_opt = app.add_option("--seed", seed, "override the master seed");
  auto* out_opt = app.add_option("--out", out_dir, "override the output directory");
  auto* mode_opt = app.add_option("--mode", mode, "override the traffic mode")
                       ->check(CLI::IsMember({"fluid", "discrete"}));

  const std::vector<std::pair<std::string, tlc::Scenario>> scenarios = {
      {"simulate", tlc::Scenario::kSimulate},
      {"optimize", tlc::Scenario::kOptimize},
      {"online", tlc::Scenario::kOnline},
      {"validate-gradient", tlc::Scenario::kValidateGradient},
      {"sweep", tlc::Scenario::kSweep},
      {"compare-baseline", tlc::Scenario::kCompareBaseline},
  };
  for (const auto& [name, sc] : scenarios) {
    // Options live on the parent; fallthrough lets them follow the subcommand.
    app.add_subcommand(name, "run the " + name + " scenario")->fallthrough();
    (void)sc;
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    tlc::ExperimentConfig cfg;
    if (config_opt->count() > 0) cfg = tlc::parse_config_file(config_path);
    for (const auto& [name, sc] : scenarios)
      if (app.got_subcommand(name)) cfg.scenario = sc;
    if (seed_opt->count() > 0) cfg.seed = seed;
    if (out_opt->count() > 0) cfg.out_dir = out_dir;
    if (mode_opt->count() > 0)
      cfg.mode = mode == "fluid" ? tlc::SimMode::kFluid : tlc::SimMode::kDiscrete;
    tlc::run_scenario(cfg, std::cout);
    return 0;
  } catch (const tlc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const tlc::ParameterError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
