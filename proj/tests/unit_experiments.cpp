#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "tlc/experiments.hpp"

using namespace tlc;
using nlohmann::ordered_json;
using Catch::Matchers::ContainsSubstring;

namespace {

ordered_json parse_text(const std::string& text) { return ordered_json::parse(text); }

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream body;
  body << in.rdbuf();
  return body.str();
}

std::filesystem::path fresh_dir(const std::string& leaf) {
  const auto dir = std::filesystem::temp_directory_path() / leaf;
  std::filesystem::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("an empty config object yields the documented defaults") {
  ExperimentConfig c = parse_config(parse_text("{}"));
  CHECK(c.scenario == Scenario::kSimulate);
  CHECK(c.mode == SimMode::kDiscrete);
  CHECK(c.rates == kVeberodRates);
  CHECK(c.h == 1.2);
  CHECK(c.seed == 1);
  CHECK(c.t_end == 1000.0);
  CHECK(c.eval_replications == 20);
  CHECK(c.out_dir == "out");
  CHECK(c.initial == default_initial_params().v);
  CHECK(master_seeds(c) == std::vector<std::uint64_t>{1});
  CHECK_NOTHROW(validate_experiment_config(c));
}

TEST_CASE("scenario and mode names round-trip") {
  for (Scenario s : {Scenario::kSimulate, Scenario::kOptimize, Scenario::kOnline,
                     Scenario::kValidateGradient, Scenario::kSweep,
                     Scenario::kCompareBaseline}) {
    ordered_json j;
    j["scenario"] = to_string(s);
    CHECK(parse_config(j).scenario == s);
  }
  CHECK(parse_config(parse_text(R"({"mode":"fluid"})")).mode == SimMode::kFluid);
  CHECK_THROWS_WITH(parse_config(parse_text(R"({"scenario":"optimise"})")),
                    ContainsSubstring("unknown scenario \"optimise\""));
  CHECK_THROWS_WITH(parse_config(parse_text(R"({"mode":"hybrid"})")),
                    ContainsSubstring("expected \"fluid\" or \"discrete\""));
}

TEST_CASE("unknown keys are reported with their path") {
  CHECK_THROWS_WITH(parse_config(parse_text(R"({"theta5": 1})")),
                    ContainsSubstring("config: unknown key \"theta5\""));
  CHECK_THROWS_WITH(parse_config(parse_text(R"({"optimizer": {"alpha": 2}})")),
                    ContainsSubstring("config.optimizer: unknown key \"alpha\""));
  CHECK_THROWS_WITH(parse_config(parse_text(R"({"fd": {"step": 0.1}})")),
                    ContainsSubstring("config.fd: unknown key \"step\""));
  CHECK_THROWS_WITH(parse_config(parse_text(R"({"perturbation": {"flows": 1}})")),
                    ContainsSubstring("config.perturbation: unknown key \"flows\""));
}

TEST_CASE("rates and interarrival are alternatives") {
  ExperimentConfig ia =
      parse_config(parse_text(R"({"interarrival": [5, 8, 20, 20]})"));
  CHECK(ia.rates[0] == Catch::Approx(0.2));
  CHECK(ia.rates[1] == Catch::Approx(0.125));
  CHECK(ia.rates[2] == Catch::Approx(0.05));
  CHECK(ia.rates[3] == Catch::Approx(0.05));

  ExperimentConfig named = parse_config(parse_text(R"({"rates": "veberod"})"));
  CHECK(named.rates == kVeberodRates);

  CHECK_THROWS_WITH(
      parse_config(parse_text(R"({"rates": [0.1,0.1,0.01,0.01], "interarrival": [5,5,20,20]})")),
      ContainsSubstring("either \"rates\" or \"interarrival\""));
  CHECK_THROWS_WITH(parse_config(parse_text(R"({"rates": "oslo"})")),
                    ContainsSubstring("unknown preset \"oslo\""));
  CHECK_THROWS_AS(parse_config(parse_text(R"({"interarrival": [5, 0, 20, 20]})")), ConfigError);
  CHECK_THROWS_WITH(parse_config(parse_text(R"({"weights": [1, 1, 1]})")),
                    ContainsSubstring("array of 4 numbers"));
}

TEST_CASE("the standard sweep preset expands to four rows") {
  ExperimentConfig c =
      parse_config(parse_text(R"({"scenario":"sweep","sweep_interarrival":"table1"})"));
  REQUIRE(c.sweep_interarrival.size() == 4);
  CHECK(c.sweep_interarrival == standard_sweep_rows());
  CHECK(c.sweep_interarrival[0] == std::array<double, 4>{5, 5, 20, 20});
  CHECK(c.sweep_interarrival[3] == std::array<double, 4>{6, 6, 10, 20});
  CHECK_THROWS_WITH(
      parse_config(parse_text(R"({"sweep_interarrival":"table2"})")),
      ContainsSubstring("unknown preset \"table2\""));
  CHECK_THROWS_AS(parse_config(parse_text(R"({"sweep_interarrival": []})")), ConfigError);
}

TEST_CASE("seeds must be nonnegative integers") {
  CHECK(parse_config(parse_text(R"({"seed": 42})")).seed == 42);
  CHECK_THROWS_AS(parse_config(parse_text(R"({"seed": -3})")), ConfigError);
  ExperimentConfig multi = parse_config(parse_text(R"({"master_seeds": [3, 5, 7]})"));
  CHECK(master_seeds(multi) == std::vector<std::uint64_t>{3, 5, 7});
  CHECK_THROWS_WITH(parse_config(parse_text(R"({"master_seeds": []})")),
                    ContainsSubstring("nonempty array of seeds"));
}

TEST_CASE("optimizer and fd blocks parse into their structs") {
  ExperimentConfig c = parse_config(parse_text(R"({
    "optimizer": {"iterations": 7, "rho0": 3.5, "decay_steps": true,
                  "smoothing": [0.7, 0.3], "source": "oracle"},
    "fd": {"delta": 0.001, "boundary_margin": 2.0}
  })"));
  CHECK(c.optimizer.iterations == 7);
  CHECK(c.optimizer.rho0 == 3.5);
  CHECK(c.optimizer.decay_steps);
  CHECK(c.optimizer.smoothing == std::array<double, 2>{0.7, 0.3});
  CHECK(c.optimizer.source == GradientSource::kOracle);
  CHECK(c.fd.delta == uniform_fd_delta(0.001));
  CHECK(c.fd.boundary_margin == 2.0);

  ExperimentConfig per_coord =
      parse_config(parse_text(R"({"fd": {"delta": [1,1,1,1,2,2,3,3,3,3]}})"));
  CHECK(per_coord.fd.delta[kTheta3] == 2.0);
  CHECK(per_coord.fd.delta[kS4] == 3.0);

  CHECK_THROWS_WITH(parse_config(parse_text(R"({"optimizer": {"source": "exact"}})")),
                    ContainsSubstring("expected \"ipa\" or \"oracle\""));
}

TEST_CASE("semantic validation catches inconsistent configs") {
  ExperimentConfig c;
  c.rates = {0.1, -0.1, 0.01, 0.01};
  CHECK_THROWS_AS(validate_experiment_config(c), ConfigError);

  c = ExperimentConfig{};
  c.scenario = Scenario::kValidateGradient;
  c.mode = SimMode::kDiscrete;
  CHECK_THROWS_WITH(validate_experiment_config(c), ContainsSubstring("requires fluid mode"));

  c = ExperimentConfig{};
  c.perturbation.flow = 7;
  CHECK_THROWS_AS(validate_experiment_config(c), ConfigError);

  c = ExperimentConfig{};
  c.perturbation = RatePerturbation{1, 1.3, 500.0, 100.0};
  CHECK_THROWS_WITH(validate_experiment_config(c), ContainsSubstring("until >= from"));

  c = ExperimentConfig{};
  c.scenario = Scenario::kCompareBaseline;
  c.scales = {1.0, -0.5};
  CHECK_THROWS_AS(validate_experiment_config(c), ConfigError);

  c = ExperimentConfig{};
  c.eval_replications = 0;
  CHECK_THROWS_AS(validate_experiment_config(c), ConfigError);

  c = ExperimentConfig{};
  c.initial[kTheta1Max] = 5.0;  // below min green
  CHECK_THROWS_AS(validate_experiment_config(c), ParameterError);

  c = ExperimentConfig{};
  c.optimizer.replications = 0;
  CHECK_THROWS_AS(validate_experiment_config(c), std::invalid_argument);
}

TEST_CASE("missing or malformed config files raise config errors") {
  CHECK_THROWS_WITH(parse_config_file("/nonexistent/conf.json"),
                    ContainsSubstring("cannot open config file"));
  const auto path = std::filesystem::temp_directory_path() / "tlc_bad_config.json";
  {
    std::ofstream out(path);
    out << "{ not json";
  }
  CHECK_THROWS_AS(parse_config_file(path.string()), ConfigError);
  std::filesystem::remove(path);
}

TEST_CASE("the resolved config echo reparses to the same settings") {
  ExperimentConfig c;
  c.scenario = Scenario::kOnline;
  c.mode = SimMode::kDiscrete;
  c.rates = {0.154, 0.175, 0.014, 0.014};
  c.seed = 9;
  c.weights = {2, 1, 0.5, 0.5};
  c.perturbation = RatePerturbation{1, 1.3, 21600.0, 36000.0};
  c.optimizer.rho0 = 24.0;
  c.optimizer.decay_steps = true;
  c.out_dir = "elsewhere";

  ExperimentConfig back = parse_config(resolved_config_json(c));
  CHECK(back.scenario == c.scenario);
  CHECK(back.mode == c.mode);
  CHECK(back.rates == c.rates);
  CHECK(back.seed == c.seed);
  CHECK(back.weights == c.weights);
  CHECK(back.perturbation.flow == 1);
  CHECK(back.perturbation.factor == 1.3);
  CHECK(back.perturbation.t_from == 21600.0);
  CHECK(back.perturbation.t_until == 36000.0);
  CHECK(back.optimizer.rho0 == 24.0);
  CHECK(back.optimizer.decay_steps);
  CHECK(back.out_dir == "elsewhere");

  // scenario-specific blocks appear exactly when they apply
  CHECK_FALSE(resolved_config_json(c).contains("sweep_interarrival"));
  c.scenario = Scenario::kSweep;
  ExperimentConfig swept = parse_config(resolved_config_json(c));
  CHECK(swept.sweep_interarrival == standard_sweep_rows());
}

TEST_CASE("a scenario rerun reproduces its artifacts byte for byte") {
  ExperimentConfig c;
  c.scenario = Scenario::kSimulate;
  c.rates = {0.2, 0.2, 0.05, 0.05};
  c.t_end = 300.0;
  c.seed = 6;

  const auto dir_a = fresh_dir("tlc_exp_rerun_a");
  const auto dir_b = fresh_dir("tlc_exp_rerun_b");
  std::ostringstream log;
  c.out_dir = dir_a.string();
  run_scenario(c, log);
  c.out_dir = dir_b.string();
  run_scenario(c, log);

  CHECK(read_file(dir_a / "trace.csv") == read_file(dir_b / "trace.csv"));
  CHECK(read_file(dir_a / "summary.json") == read_file(dir_b / "summary.json"));

  // the echoed config reproduces the run when fed back in
  ExperimentConfig echoed = parse_config(ordered_json::parse(
      read_file(dir_a / "config_resolved.json")));
  const auto dir_c = fresh_dir("tlc_exp_rerun_c");
  echoed.out_dir = dir_c.string();
  run_scenario(echoed, log);
  CHECK(read_file(dir_c / "trace.csv") == read_file(dir_a / "trace.csv"));

  std::filesystem::remove_all(dir_a);
  std::filesystem::remove_all(dir_b);
  std::filesystem::remove_all(dir_c);
}

TEST_CASE("trace summaries expose switching diagnostics") {
  ExperimentConfig c;
  c.scenario = Scenario::kSimulate;
  c.rates = {0.2, 0.2, 0.05, 0.05};
  c.t_end = 400.0;
  c.seed = 3;
  const auto dir = fresh_dir("tlc_exp_summary");
  c.out_dir = dir.string();
  std::ostringstream log;
  run_scenario(c, log);

  ordered_json summary = ordered_json::parse(read_file(dir / "summary.json"));
  CHECK(summary["cost"].get<double>() > 0.0);
  CHECK(summary["t_end"].get<double>() == 400.0);
  CHECK(summary["switches"].get<long long>() > 0);
  CHECK(summary["events"].get<long long>() > 0);
  CHECK_FALSE(summary["chattering"].get<bool>());
  CHECK(log.str().find("simulate: cost") != std::string::npos);
  std::filesystem::remove_all(dir);
}