#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "tlc/optimizer.hpp"
#include "tlc/oracle.hpp"

namespace tlc {

// Rejected or malformed configuration input. Distinct from runtime failures
// so the CLI can map it to its own exit code.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Scenario {
  kSimulate,
  kOptimize,
  kOnline,
  kValidateGradient,
  kSweep,
  kCompareBaseline,
};

inline std::string to_string(Scenario s) {
  switch (s) {
    case Scenario::kSimulate: return "simulate";
    case Scenario::kOptimize: return "optimize";
    case Scenario::kOnline: return "online";
    case Scenario::kValidateGradient: return "validate-gradient";
    case Scenario::kSweep: return "sweep";
    case Scenario::kCompareBaseline: return "compare-baseline";
  }
  return "?";
}

// Mean arrival rates measured at the Veberod intersection (vehicles roads
// 1, 2 then pedestrian crossings 1, 2), the default load for comparisons.
inline constexpr std::array<double, 4> kVeberodRates{0.11, 0.125, 0.01, 0.01};

// Standard sweep rows: mean interarrival times (seconds) per flow.
inline std::vector<std::array<double, 4>> standard_sweep_rows() {
  return {{5, 5, 20, 20}, {5, 8, 20, 20}, {8, 8, 20, 20}, {6, 6, 10, 20}};
}

inline std::array<double, 4> rates_from_interarrival(const std::array<double, 4>& ia) {
  std::array<double, 4> r{};
  for (int n = 0; n < 4; ++n) {
    if (!(ia[n] > 0.0)) throw ConfigError("interarrival times must be positive");
    r[n] = 1.0 / ia[n];
  }
  return r;
}

struct ExperimentConfig {
  Scenario scenario = Scenario::kSimulate;
  SimMode mode = SimMode::kDiscrete;
  std::array<double, 4> rates = kVeberodRates;
  double h = 1.2;
  std::array<double, 4> weights{1, 1, 1, 1};
  Vec10 initial = default_initial_params().v;
  std::uint64_t seed = 1;
  std::vector<std::uint64_t> master_seeds;  // empty: use {seed}
  double t_end = 1000.0;                    // horizon for single paths and evaluations
  int eval_replications = 20;
  double rate_window = 60.0;
  double fluid_segment_mean = 30.0;
  bool fluid_constant_rates = false;
  RatePerturbation perturbation;
  OptimizerConfig optimizer;
  FdOptions fd;
  std::vector<std::array<double, 4>> sweep_interarrival;  // empty: standard rows
  std::vector<double> scales{1.0, 1.5, 2.0};
  std::string out_dir = "out";
};

inline std::vector<std::uint64_t> master_seeds(const ExperimentConfig& c) {
  if (!c.master_seeds.empty()) return c.master_seeds;
  return {c.seed};
}

inline ArrivalProcessSpec arrival_spec(const ExperimentConfig& c) {
  ArrivalProcessSpec s;
  s.mode = c.mode;
  s.mean_rate = c.rates;
  s.h = c.h;
  s.seed = c.seed;
  s.fluid_segment_mean = c.fluid_segment_mean;
  s.fluid_constant_rates = c.fluid_constant_rates;
  s.perturbation = c.perturbation;
  return s;
}

inline void validate_experiment_config(const ExperimentConfig& c) {
  for (int n = 0; n < 4; ++n)
    if (!(c.rates[n] > 0.0)) throw ConfigError("rates must be positive");
  if (!(c.h > 0.0)) throw ConfigError("h must be positive");
  for (int n = 0; n < 4; ++n)
    if (c.weights[n] < 0.0) throw ConfigError("weights must be nonnegative");
  if (!(c.t_end > 0.0)) throw ConfigError("t_end must be positive");
  if (c.eval_replications < 1) throw ConfigError("eval_replications must be >= 1");
  if (!(c.rate_window > 0.0)) throw ConfigError("rate_window must be positive");
  if (!(c.fluid_segment_mean > 0.0)) throw ConfigError("fluid_segment_mean must be positive");
  if (c.perturbation.flow != 0 &&
      (c.perturbation.flow < 1 || c.perturbation.flow > 4))
    throw ConfigError("perturbation.flow must be 1..4 (or 0 to disable)");
  if (c.perturbation.active() && !(c.perturbation.t_until >= c.perturbation.t_from))
    throw ConfigError("perturbation window must have until >= from");
  if (c.scenario == Scenario::kValidateGradient && c.mode != SimMode::kFluid)
    throw ConfigError("validate-gradient requires fluid mode");
  if (c.scenario == Scenario::kCompareBaseline) {
    if (c.scales.empty()) throw ConfigError("compare-baseline needs at least one scale");
    for (double s : c.scales)
      if (!(s > 0.0)) throw ConfigError("scales must be positive");
  }
  validate_parameters(c.initial);
  validate_optimizer_config(c.optimizer);
}

namespace cfgdetail {

using json = nlohmann::ordered_json;

[[noreturn]] inline void fail(const std::string& path, const std::string& what) {
  throw ConfigError(path + ": " + what);
}

inline void check_keys(const json& j, const std::string& path,
                       std::initializer_list<std::string_view> allowed) {
  for (const auto& item : j.items()) {
    bool known = false;
    for (std::string_view a : allowed)
      if (item.key() == a) {
        known = true;
        break;
      }
    if (!known) fail(path, "unknown key \"" + item.key() + "\"");
  }
}

inline double as_number(const json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "expected a number");
  return v.get<double>();
}

inline bool as_bool(const json& v, const std::string& path) {
  if (!v.is_boolean()) fail(path, "expected true or false");
  return v.get<bool>();
}

inline std::string as_string(const json& v, const std::string& path) {
  if (!v.is_string()) fail(path, "expected a string");
  return v.get<std::string>();
}

inline int as_int(const json& v, const std::string& path) {
  if (!v.is_number_integer()) fail(path, "expected an integer");
  return v.get<int>();
}

inline std::uint64_t as_seed(const json& v, const std::string& path) {
  if (!v.is_number_unsigned()) fail(path, "expected a nonnegative integer");
  return v.get<std::uint64_t>();
}

template <std::size_t N>
std::array<double, N> as_vector(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != N)
    fail(path, "expected an array of " + std::to_string(N) + " numbers");
  std::array<double, N> out{};
  for (std::size_t i = 0; i < N; ++i) out[i] = as_number(v[i], path);
  return out;
}

inline Scenario as_scenario(const json& v, const std::string& path) {
  const std::string s = as_string(v, path);
  if (s == "simulate") return Scenario::kSimulate;
  if (s == "optimize") return Scenario::kOptimize;
  if (s == "online") return Scenario::kOnline;
  if (s == "validate-gradient") return Scenario::kValidateGradient;
  if (s == "sweep") return Scenario::kSweep;
  if (s == "compare-baseline") return Scenario::kCompareBaseline;
  fail(path, "unknown scenario \"" + s + "\"");
}

inline SimMode as_mode(const json& v, const std::string& path) {
  const std::string s = as_string(v, path);
  if (s == "fluid") return SimMode::kFluid;
  if (s == "discrete") return SimMode::kDiscrete;
  fail(path, "expected \"fluid\" or \"discrete\"");
}

inline void parse_optimizer(const json& j, const std::string& path, OptimizerConfig& o) {
  if (!j.is_object()) fail(path, "expected an object");
  check_keys(j, path,
             {"iterations", "replications", "path_length", "rho0", "decay_steps",
              "smoothing", "smooth_costs", "window", "horizon", "source"});
  if (j.contains("iterations")) o.iterations = as_int(j["iterations"], path + ".iterations");
  if (j.contains("replications"))
    o.replications = as_int(j["replications"], path + ".replications");
  if (j.contains("path_length"))
    o.path_length = as_number(j["path_length"], path + ".path_length");
  if (j.contains("rho0")) o.rho0 = as_number(j["rho0"], path + ".rho0");
  if (j.contains("decay_steps")) o.decay_steps = as_bool(j["decay_steps"], path + ".decay_steps");
  if (j.contains("smoothing")) o.smoothing = as_vector<2>(j["smoothing"], path + ".smoothing");
  if (j.contains("smooth_costs"))
    o.smooth_costs = as_bool(j["smooth_costs"], path + ".smooth_costs");
  if (j.contains("window")) o.window = as_number(j["window"], path + ".window");
  if (j.contains("horizon")) o.horizon = as_number(j["horizon"], path + ".horizon");
  if (j.contains("source")) {
    const std::string s = as_string(j["source"], path + ".source");
    if (s == "ipa")
      o.source = GradientSource::kIpa;
    else if (s == "oracle")
      o.source = GradientSource::kOracle;
    else
      fail(path + ".source", "expected \"ipa\" or \"oracle\"");
  }
}

inline void parse_fd(const json& j, const std::string& path, FdOptions& fd) {
  if (!j.is_object()) fail(path, "expected an object");
  check_keys(j, path, {"delta", "boundary_margin"});
  if (j.contains("delta")) {
    const json& d = j["delta"];
    if (d.is_number())
      fd.delta = uniform_fd_delta(as_number(d, path + ".delta"));
    else
      fd.delta = as_vector<10>(d, path + ".delta");
  }
  if (j.contains("boundary_margin"))
    fd.boundary_margin = as_number(j["boundary_margin"], path + ".boundary_margin");
}

inline void parse_perturbation(const json& j, const std::string& path, RatePerturbation& p) {
  if (!j.is_object()) fail(path, "expected an object");
  check_keys(j, path, {"flow", "factor", "from", "until"});
  if (j.contains("flow")) p.flow = as_int(j["flow"], path + ".flow");
  if (j.contains("factor")) p.factor = as_number(j["factor"], path + ".factor");
  if (j.contains("from")) p.t_from = as_number(j["from"], path + ".from");
  if (j.contains("until")) p.t_until = as_number(j["until"], path + ".until");
}

}  // namespace cfgdetail

// Strict parse: unknown keys anywhere are errors, reported with their path.
// Absent keys keep the documented defaults. "rates" accepts the preset name
// "veberod" or a 4-vector; "interarrival" is the reciprocal alternative.
inline ExperimentConfig parse_config(const nlohmann::ordered_json& j) {
  using namespace cfgdetail;
  if (!j.is_object()) throw ConfigError("config: expected a JSON object");
  check_keys(j, "config",
             {"scenario", "mode", "rates", "interarrival", "h", "weights", "initial_params",
              "seed", "master_seeds", "t_end", "eval_replications", "rate_window",
              "fluid_segment_mean", "fluid_constant_rates", "perturbation", "optimizer",
              "fd", "sweep_interarrival", "scales", "out"});
  ExperimentConfig c;
  if (j.contains("scenario")) c.scenario = as_scenario(j["scenario"], "config.scenario");
  if (j.contains("mode")) c.mode = as_mode(j["mode"], "config.mode");
  if (j.contains("rates") && j.contains("interarrival"))
    fail("config", "give either \"rates\" or \"interarrival\", not both");
  if (j.contains("rates")) {
    if (j["rates"].is_string()) {
      const std::string name = j["rates"].get<std::string>();
      if (name != "veberod") fail("config.rates", "unknown preset \"" + name + "\"");
      c.rates = kVeberodRates;
    } else {
      c.rates = as_vector<4>(j["rates"], "config.rates");
    }
  }
  if (j.contains("interarrival"))
    c.rates = rates_from_interarrival(as_vector<4>(j["interarrival"], "config.interarrival"));
  if (j.contains("h")) c.h = as_number(j["h"], "config.h");
  if (j.contains("weights")) c.weights = as_vector<4>(j["weights"], "config.weights");
  if (j.contains("initial_params"))
    c.initial = as_vector<10>(j["initial_params"], "config.initial_params");
  if (j.contains("seed")) c.seed = as_seed(j["seed"], "config.seed");
  if (j.contains("master_seeds")) {
    const auto& a = j["master_seeds"];
    if (!a.is_array() || a.empty())
      fail("config.master_seeds", "expected a nonempty array of seeds");
    for (std::size_t i = 0; i < a.size(); ++i)
      c.master_seeds.push_back(as_seed(a[i], "config.master_seeds"));
  }
  if (j.contains("t_end")) c.t_end = as_number(j["t_end"], "config.t_end");
  if (j.contains("eval_replications"))
    c.eval_replications = as_int(j["eval_replications"], "config.eval_replications");
  if (j.contains("rate_window")) c.rate_window = as_number(j["rate_window"], "config.rate_window");
  if (j.contains("fluid_segment_mean"))
    c.fluid_segment_mean = as_number(j["fluid_segment_mean"], "config.fluid_segment_mean");
  if (j.contains("fluid_constant_rates"))
    c.fluid_constant_rates = as_bool(j["fluid_constant_rates"], "config.fluid_constant_rates");
  if (j.contains("perturbation"))
    parse_perturbation(j["perturbation"], "config.perturbation", c.perturbation);
  if (j.contains("optimizer")) parse_optimizer(j["optimizer"], "config.optimizer", c.optimizer);
  if (j.contains("fd")) parse_fd(j["fd"], "config.fd", c.fd);
  if (j.contains("sweep_interarrival")) {
    const auto& a = j["sweep_interarrival"];
    if (a.is_string()) {
      const std::string name = a.get<std::string>();
      if (name != "table1") fail("config.sweep_interarrival", "unknown preset \"" + name + "\"");
      c.sweep_interarrival = standard_sweep_rows();
    } else if (a.is_array() && !a.empty()) {
      for (std::size_t i = 0; i < a.size(); ++i)
        c.sweep_interarrival.push_back(as_vector<4>(
            a[i], "config.sweep_interarrival[" + std::to_string(i) + "]"));
    } else {
      fail("config.sweep_interarrival", "expected a nonempty array or \"table1\"");
    }
  }
  if (j.contains("scales")) {
    const auto& a = j["scales"];
    if (!a.is_array() || a.empty()) fail("config.scales", "expected a nonempty array");
    c.scales.clear();
    for (std::size_t i = 0; i < a.size(); ++i)
      c.scales.push_back(as_number(a[i], "config.scales"));
  }
  if (j.contains("out")) c.out_dir = as_string(j["out"], "config.out");
  return c;
}

inline ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  nlohmann::ordered_json j;
  try {
    j = nlohmann::ordered_json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return parse_config(j);
}

// Canonical echo of every effective setting; written next to the artifacts
// so a run can be reproduced from its output directory alone.
inline nlohmann::ordered_json resolved_config_json(const ExperimentConfig& c) {
  nlohmann::ordered_json j;
  j["scenario"] = to_string(c.scenario);
  j["mode"] = c.mode == SimMode::kFluid ? "fluid" : "discrete";
  j["rates"] = c.rates;
  j["h"] = c.h;
  j["weights"] = c.weights;
  j["initial_params"] = c.initial;
  j["seed"] = c.seed;
  j["master_seeds"] = master_seeds(c);
  j["t_end"] = c.t_end;
  j["eval_replications"] = c.eval_replications;
  j["rate_window"] = c.rate_window;
  j["fluid_segment_mean"] = c.fluid_segment_mean;
  j["fluid_constant_rates"] = c.fluid_constant_rates;
  j["perturbation"] = {{"flow", c.perturbation.flow},
                       {"factor", c.perturbation.factor},
                       {"from", c.perturbation.t_from},
                       {"until", c.perturbation.t_until}};
  j["optimizer"] = {
      {"iterations", c.optimizer.iterations},
      {"replications", c.optimizer.replications},
      {"path_length", c.optimizer.path_length},
      {"rho0", c.optimizer.rho0},
      {"decay_steps", c.optimizer.decay_steps},
      {"smoothing", c.optimizer.smoothing},
      {"smooth_costs", c.optimizer.smooth_costs},
      {"window", c.optimizer.window},
      {"horizon", c.optimizer.horizon},
      {"source", c.optimizer.source == GradientSource::kIpa ? "ipa" : "oracle"},
  };
  j["fd"] = {{"delta", c.fd.delta}, {"boundary_margin", c.fd.boundary_margin}};
  if (c.scenario == Scenario::kSweep) {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& r : c.sweep_interarrival.empty() ? standard_sweep_rows()
                                                      : c.sweep_interarrival)
      rows.push_back(r);
    j["sweep_interarrival"] = rows;
  }
  if (c.scenario == Scenario::kCompareBaseline) j["scales"] = c.scales;
  j["out"] = c.out_dir;
  return j;
}

namespace detail {

inline void write_file(const std::filesystem::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << body;
}

inline void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& j) {
  write_file(path, j.dump(2) + "\n");
}

// Replication-mean cost at fixed parameters; seeds derive from the tag so
// baseline and controlled runs at the same tag share arrival randomness.
inline double mean_cost(const ArrivalProcessSpec& proto, const ParameterVector& params,
                        double t_end, Policy policy, const std::array<double, 4>& weights,
                        int reps, std::uint64_t tag) {
  SimOptions so;
  so.weights = weights;
  double total = 0.0;
  for (int r = 0; r < reps; ++r) {
    ArrivalProcessSpec spec = proto;
    spec.seed = mix_seed(tag, static_cast<std::uint64_t>(r));
    total += run_sample_path(spec, params, t_end, policy, so).cost;
  }
  return total / reps;
}

inline std::string trajectory_csv(const OptimizationTrajectory& traj) {
  std::string s = "iteration";
  for (int i = 1; i <= 10; ++i) s += ",v" + std::to_string(i);
  s += ",j_hat,grad_norm,rho\n";
  for (const IterationRecord& r : traj.steps) {
    s += std::to_string(r.iteration);
    for (double v : r.params) s += "," + fmt_fixed(v, 6);
    s += "," + fmt_fixed(r.j_hat, 9);
    s += "," + fmt_fixed(inf_norm(r.gradient), 9);
    s += "," + fmt_fixed(r.rho, 6);
    s += "\n";
  }
  return s;
}

inline nlohmann::ordered_json trajectory_summary(const OptimizationTrajectory& traj) {
  nlohmann::ordered_json j;
  j["iterations"] = traj.steps.empty() ? 0 : traj.steps.back().iteration;
  j["initial_cost"] = traj.initial_cost();
  j["final_cost"] = traj.final_cost();
  j["reduction_percent"] = traj.reduction_percent();
  j["final_params"] = traj.steps.back().params;
  return j;
}

inline nlohmann::ordered_json trace_summary(const EventTrace& tr) {
  const double span = tr.t_end - tr.t_begin;
  const double per_100s =
      span > 0.0 ? 100.0 * static_cast<double>(tr.diagnostics.switch_count) / span : 0.0;
  nlohmann::ordered_json j;
  j["cost"] = tr.cost;
  j["t_end"] = tr.t_end;
  j["events"] = tr.diagnostics.events_processed;
  j["switches"] = tr.diagnostics.switch_count;
  j["switches_per_100s"] = per_100s;
  j["chattering"] = per_100s > 50.0;
  j["empty_intersection_switches"] = tr.diagnostics.x0_forced_switches;
  return j;
}

}  // namespace detail

// Runs the configured scenario and writes its artifacts (plus the resolved
// config) under out_dir. Throws ConfigError for bad input, other exceptions
// for runtime failures; the CLI maps these to exit codes.
inline void run_scenario(const ExperimentConfig& cfg, std::ostream& log) {
  validate_experiment_config(cfg);
  const std::filesystem::path out(cfg.out_dir);
  std::filesystem::create_directories(out);
  detail::write_json(out / "config_resolved.json", resolved_config_json(cfg));

  const ParameterVector initial = validate_parameters(cfg.initial);
  const ArrivalProcessSpec spec = arrival_spec(cfg);

  switch (cfg.scenario) {
    case Scenario::kSimulate: {
      SimOptions so;
      so.weights = cfg.weights;
      so.rate_window = cfg.rate_window;
      EventTrace tr = run_sample_path(spec, initial, cfg.t_end, Policy::kQuasiDynamic, so);
      std::ofstream csv(out / "trace.csv", std::ios::binary);
      write_trace_csv(tr, csv);
      detail::write_json(out / "summary.json", detail::trace_summary(tr));
      log << "simulate: cost " << fmt_sig(tr.cost) << ", "
          << tr.diagnostics.switch_count << " switches over " << fmt_sig(cfg.t_end)
          << " s\n";
      break;
    }
    case Scenario::kOptimize: {
      OptimizerConfig oc = cfg.optimizer;
      oc.weights = cfg.weights;
      nlohmann::ordered_json runs = nlohmann::ordered_json::array();
      for (std::uint64_t ms : master_seeds(cfg)) {
        OptimizationTrajectory traj = batch_optimize(oc, spec, initial, ms);
        detail::write_file(out / ("trajectory_seed" + std::to_string(ms) + ".csv"),
                           detail::trajectory_csv(traj));
        nlohmann::ordered_json r = detail::trajectory_summary(traj);
        r["master_seed"] = ms;
        runs.push_back(r);
        log << "optimize: seed " << ms << " cost " << fmt_sig(traj.initial_cost())
            << " -> " << fmt_sig(traj.final_cost()) << " ("
            << fmt_fixed(traj.reduction_percent(), 1) << "% reduction)\n";
      }
      detail::write_json(out / "summary.json", {{"runs", runs}});
      break;
    }
    case Scenario::kOnline: {
      OptimizerConfig oc = cfg.optimizer;
      oc.weights = cfg.weights;
      nlohmann::ordered_json runs = nlohmann::ordered_json::array();
      for (std::uint64_t ms : master_seeds(cfg)) {
        ArrivalProcessSpec s = spec;
        s.seed = ms;
        OptimizationTrajectory traj = online_optimize(oc, s, initial);
        detail::write_file(out / ("trajectory_seed" + std::to_string(ms) + ".csv"),
                           detail::trajectory_csv(traj));
        nlohmann::ordered_json r = detail::trajectory_summary(traj);
        r["master_seed"] = ms;
        runs.push_back(r);
        log << "online: seed " << ms << " windowed cost " << fmt_sig(traj.initial_cost())
            << " -> " << fmt_sig(traj.final_cost()) << "\n";
      }
      detail::write_json(out / "summary.json", {{"runs", runs}});
      break;
    }
    case Scenario::kValidateGradient: {
      SimOptions so;
      so.weights = cfg.weights;
      EventTrace tr = run_sample_path(spec, initial, cfg.t_end, Policy::kQuasiDynamic, so);
      GradientReport ipa = ipa_gradient(tr, cfg.weights);
      FdOptions fo = cfg.fd;
      fo.weights = cfg.weights;
      FdResult fd = finite_difference_gradient(spec, initial, cfg.t_end, fo);
      GradientComparison cmp = compare_gradients(ipa.grad, fd);
      nlohmann::ordered_json j;
      j["cost"] = ipa.L;
      j["ipa"] = ipa.grad;
      j["fd"] = fd.grad;
      j["fd_stable"] = fd.stable;
      j["fd_effective_delta"] = fd.effective_delta;
      j["cosine"] = cmp.cosine;
      j["stable_count"] = cmp.stable_count;
      j["compared_count"] = cmp.compared_count;
      j["rel_err"] = cmp.rel_err;
      j["max_rel_err"] = cmp.max_rel_err;
      detail::write_json(out / "gradient_check.json", j);
      log << "validate-gradient: cosine " << fmt_sig(cmp.cosine) << " over "
          << cmp.stable_count << " stable coordinates, max rel err "
          << fmt_sig(cmp.max_rel_err) << "\n";
      break;
    }
    case Scenario::kSweep: {
      OptimizerConfig oc = cfg.optimizer;
      oc.weights = cfg.weights;
      const auto rows =
          cfg.sweep_interarrival.empty() ? standard_sweep_rows() : cfg.sweep_interarrival;
      std::string csv = "ia1,ia2,ia3,ia4,j_init,j_opt";
      for (int i = 1; i <= 10; ++i) csv += ",v" + std::to_string(i) + "_opt";
      csv += ",reduction_percent\n";
      for (const auto& ia : rows) {
        ArrivalProcessSpec s = spec;
        s.mean_rate = rates_from_interarrival(ia);
        OptimizationTrajectory traj = batch_optimize(oc, s, initial, cfg.seed);
        for (double v : ia) csv += fmt_fixed(v, 3) + ",";
        csv += fmt_fixed(traj.initial_cost(), 9) + "," + fmt_fixed(traj.final_cost(), 9);
        for (double v : traj.steps.back().params) csv += "," + fmt_fixed(v, 6);
        csv += "," + fmt_fixed(traj.reduction_percent(), 3) + "\n";
        log << "sweep: interarrival [" << fmt_sig(ia[0]) << ", " << fmt_sig(ia[1]) << ", "
            << fmt_sig(ia[2]) << ", " << fmt_sig(ia[3]) << "] cost "
            << fmt_sig(traj.initial_cost()) << " -> " << fmt_sig(traj.final_cost()) << " ("
            << fmt_fixed(traj.reduction_percent(), 1) << "%)\n";
      }
      detail::write_file(out / "sweep.csv", csv);
      break;
    }
    case Scenario::kCompareBaseline: {
      OptimizerConfig oc = cfg.optimizer;
      oc.weights = cfg.weights;
      std::string csv = "scale,j_baseline,j_tlc_initial,j_tlc_optimized\n";
      for (std::size_t k = 0; k < cfg.scales.size(); ++k) {
        const double scale = cfg.scales[k];
        ArrivalProcessSpec s = spec;
        for (int n = 0; n < 4; ++n) s.mean_rate[n] = cfg.rates[n] * scale;
        const std::uint64_t tag = mix_seed(cfg.seed, 0xba5eULL, k);
        const double j_base = detail::mean_cost(s, initial, cfg.t_end, Policy::kBaseline,
                                                cfg.weights, cfg.eval_replications, tag);
        const double j_init = detail::mean_cost(s, initial, cfg.t_end, Policy::kQuasiDynamic,
                                                cfg.weights, cfg.eval_replications, tag);
        OptimizationTrajectory traj = batch_optimize(oc, s, initial, cfg.seed);
        const ParameterVector opt = validate_parameters(traj.steps.back().params);
        const double j_opt = detail::mean_cost(s, opt, cfg.t_end, Policy::kQuasiDynamic,
                                               cfg.weights, cfg.eval_replications, tag);
        csv += fmt_fixed(scale, 3) + "," + fmt_fixed(j_base, 9) + "," +
               fmt_fixed(j_init, 9) + "," + fmt_fixed(j_opt, 9) + "\n";
        log << "compare-baseline: scale " << fmt_fixed(scale, 2) << " baseline "
            << fmt_sig(j_base) << ", unoptimized " << fmt_sig(j_init) << ", optimized "
            << fmt_sig(j_opt) << "\n";
      }
      detail::write_file(out / "compare.csv", csv);
      break;
    }
  }
}

}  // namespace tlc
