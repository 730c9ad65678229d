// mlep: simulate AR Markov sequences, run MLE-processes, KDE and Monte Carlo studies.
//
// Every subcommand accepts --config <json>; explicit flags override its keys.
// Output goes to --output-dir, else $MLEP_OUTPUT_DIR, else the working directory.
// Exit codes: 0 success, 2 usage or invalid configuration, 3 estimation or
// study failure, 1 anything else (I/O included).

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "mlep/density.hpp"
#include "mlep/error.hpp"
#include "mlep/mc.hpp"
#include "mlep/preliminary.hpp"
#include "mlep/process.hpp"
#include "mlep/simulate.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kUsage = 2;
constexpr int kFailure = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

const std::set<std::string> kPipelineKeys{"preliminary", "process",      "fisher",
                                          "fisher_window", "score_window", "grid_points"};

// "0.5" -> 0.5, "10000" -> 10000, "example2" -> "example2".
json parse_scalar(const std::string& text) {
  const json v = json::parse(text, nullptr, false);
  if (!v.is_discarded() && (v.is_number() || v.is_boolean())) return v;
  return text;
}

// Config file first, then every flag given on the command line. Flag names map
// to keys with '-' replaced by '_'.
json resolve_config(const CLI::App& sub, const std::string& config_path, bool nest_pipeline) {
  json cfg = json::object();
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) throw UsageError("cannot read config file " + config_path);
    cfg = json::parse(in, nullptr, false);
    if (cfg.is_discarded() || !cfg.is_object()) throw UsageError("config file is not a JSON object: " + config_path);
  }
  for (const CLI::Option* opt : sub.get_options()) {
    const std::string& name = opt->get_lnames().empty() ? std::string() : opt->get_lnames().front();
    if (name.empty() || name == "help" || name == "config" || name == "output-dir" || opt->count() == 0) continue;
    std::string key = name;
    std::replace(key.begin(), key.end(), '-', '_');
    const std::vector<std::string> raw = opt->results();
    json value;
    if (opt->get_expected_max() > 1) {
      value = json::array();
      for (const auto& r : raw) value.push_back(parse_scalar(r));
    } else {
      value = parse_scalar(raw.back());
    }
    if (nest_pipeline && kPipelineKeys.contains(key))
      cfg["pipeline"][key] = value;
    else
      cfg[key] = value;
  }
  return cfg;
}

fs::path output_dir(const std::string& flag) {
  fs::path dir = ".";
  if (!flag.empty())
    dir = flag;
  else if (const char* env = std::getenv("MLEP_OUTPUT_DIR"); env != nullptr && *env != '\0')
    dir = env;
  fs::create_directories(dir);
  return dir;
}

template <typename Write>
fs::path write_file(const fs::path& path, Write&& write) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  write(out);
  out.flush();
  if (!out) throw std::runtime_error("failed writing " + path.string());
  std::cout << path.string() << '\n';
  return path;
}

void write_json(const fs::path& path, const json& j) {
  write_file(path, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
}

std::string format_of(const json& cfg) {
  const std::string f = cfg.value("format", std::string("csv"));
  if (f != "csv" && f != "json") throw UsageError("--format must be csv or json");
  return f;
}

mlep::Vector theta_of(const json& cfg, const char* key) {
  if (!cfg.contains(key)) throw UsageError(std::string("missing --") + key);
  const json& t = cfg.at(key);
  if (t.is_array()) {
    const auto v = t.get<std::vector<double>>();
    return Eigen::Map<const mlep::Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
  }
  return mlep::scalar(t.get<double>());
}

struct Data {
  mlep::Trajectory traj;
  mlep::ModelSpec model;
};

// --input if given, else an inline simulation from --model/--theta/--n/--seed.
Data load_or_simulate(json& cfg) {
  if (cfg.contains("input")) {
    mlep::Trajectory traj = mlep::load_trajectory(cfg.at("input").get<std::string>());
    if (!cfg.contains("model")) cfg["model"] = traj.model_name;
    return {std::move(traj), mlep::model_by_name(cfg.at("model").get<std::string>())};
  }
  if (!cfg.contains("model")) throw UsageError("missing --model");
  mlep::ModelSpec model = mlep::model_by_name(cfg.at("model").get<std::string>());
  if (!cfg.contains("n") || !cfg.contains("seed")) throw UsageError("need --input, or --theta, --n and --seed");
  const mlep::SimulationOptions sim{cfg.value("burn_in", std::size_t{1000}), cfg.value("x_init", 0.0)};
  mlep::Trajectory traj = mlep::simulate(model, theta_of(cfg, "theta"), cfg.at("n").get<std::size_t>(),
                                         cfg.at("seed").get<std::uint64_t>(), sim);
  return {std::move(traj), std::move(model)};
}

int run_simulate(json cfg, const fs::path& dir) {
  if (!cfg.contains("model")) throw UsageError("missing --model");
  const mlep::ModelSpec model = mlep::model_by_name(cfg.at("model").get<std::string>());
  const std::string format = format_of(cfg);
  if (!cfg.contains("n") || !cfg.contains("seed")) throw UsageError("missing --n or --seed");
  const mlep::SimulationOptions sim{cfg.value("burn_in", std::size_t{1000}), cfg.value("x_init", 0.0)};
  const mlep::Trajectory traj = mlep::simulate(model, theta_of(cfg, "theta"), cfg.at("n").get<std::size_t>(),
                                               cfg.at("seed").get<std::uint64_t>(), sim);
  if (format == "json") {
    json j = mlep::to_json(traj);
    j["config"] = cfg;
    write_json(dir / "trajectory.json", j);
  } else {
    write_file(dir / "trajectory.csv", [&](std::ostream& os) { mlep::write_csv(os, traj); });
  }
  return 0;
}

int run_estimate(json cfg, const fs::path& dir) {
  const std::string format = format_of(cfg);
  const auto [traj, model] = load_or_simulate(cfg);

  const double delta = cfg.value("delta", 0.75);
  mlep::Pipeline pipeline = mlep::pipeline_from_json(cfg.value("pipeline", json::object()));
  pipeline.options.stride = cfg.value("stride", std::size_t{0});
  if (!pipeline.process) throw UsageError("estimate needs a process; use --process one-step|...");
  cfg["delta"] = delta;
  cfg["pipeline"] = mlep::to_json(pipeline);

  const std::size_t big_n = mlep::learning_length(traj.n(), delta);
  const mlep::PreliminaryEstimate prelim =
      mlep::preliminary_estimate(pipeline.preliminary, traj, big_n, model, pipeline.grid_points);
  const mlep::EstimatorPath path =
      mlep::estimator_path(*pipeline.process, traj, model, prelim, pipeline.options, pipeline.grid_points);

  if (format == "json")
    write_json(dir / "path.json", mlep::to_json(path, traj.n(), cfg));
  else
    write_file(dir / "path.csv", [&](std::ostream& os) { mlep::write_csv(os, path, traj.n(), cfg); });

  const mlep::Vector& terminal = path.terminal();
  write_json(dir / "summary.json", {{"config", cfg},
                                    {"n", traj.n()},
                                    {"learning_length", big_n},
                                    {"preliminary", mlep::to_json(prelim)},
                                    {"terminal", std::vector<double>(terminal.begin(), terminal.end())},
                                    {"projected_at", path.projected_at}});
  return 0;
}

int run_kde(json cfg, const fs::path& dir) {
  const std::string format = format_of(cfg);
  const auto [traj, model] = load_or_simulate(cfg);

  const std::span<const double> sample(traj.observations.data() + 1, traj.n());
  const double h = cfg.contains("bandwidth") ? cfg.at("bandwidth").get<double>() : mlep::default_bandwidth(traj.n());
  const std::size_t points = cfg.value("grid_points", std::size_t{512});
  if (points < 2) throw UsageError("--grid-points must be at least 2");
  std::vector<double> grid;
  if (cfg.contains("lower") || cfg.contains("upper")) {
    if (!cfg.contains("lower") || !cfg.contains("upper")) throw UsageError("--lower and --upper go together");
    const double lo = cfg.at("lower").get<double>(), hi = cfg.at("upper").get<double>();
    if (!(hi > lo)) throw UsageError("--upper must exceed --lower");
    for (std::size_t i = 0; i < points; ++i)
      grid.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1));
  } else {
    grid = mlep::default_grid(sample, h, points);
  }
  const mlep::DensityEstimate est = mlep::kde(traj, grid, h);
  cfg["bandwidth"] = est.bandwidth;
  cfg["grid_points"] = points;

  if (format == "json")
    write_json(dir / "density.json",
               {{"config", cfg}, {"n_used", est.n_used}, {"x", est.grid}, {"density", est.values}});
  else
    write_file(dir / "density.csv", [&](std::ostream& os) { mlep::write_csv(os, est, cfg); });
  return 0;
}

int run_mc(json cfg, const fs::path& dir) {
  if (cfg.contains("theta")) cfg["theta0"] = cfg.at("theta"), cfg.erase("theta");
  if (cfg.contains("seed")) cfg["base_seed"] = cfg.at("seed"), cfg.erase("seed");
  const mlep::McConfig mc = mlep::mc_config_from_json(cfg);
  const mlep::McReport report = mlep::run_study(mc);
  write_json(dir / "mc_report.json", mlep::to_json(report));
  write_file(dir / "mc_errors.csv", [&](std::ostream& os) { mlep::write_csv(os, report); });
  return 0;
}

void add_trajectory_source(CLI::App* sub) {
  sub->add_option("--input", "Trajectory file (.csv or .json) instead of simulating");
  sub->add_option("--model", "example1 | example2 | linear");
  sub->add_option("--theta", "True parameter for inline simulation")->expected(1, 16);
  sub->add_option("--n", "Sample size for inline simulation");
  sub->add_option("--seed", "Seed for inline simulation");
  sub->add_option("--burn-in", "Discarded initial steps (default 1000)");
  sub->add_option("--x-init", "Starting state (default 0)");
}

void add_pipeline(CLI::App* sub) {
  sub->add_option("--delta", "Learning interval N = round(n^delta)");
  sub->add_option("--preliminary", "mle | bayes | emm");
  sub->add_option("--process", "one-step | second-preliminary | two-step | recurrent | full-mle");
  sub->add_option("--fisher", "observed | plugin | factorized");
  sub->add_option("--fisher-window", "learning | running");
  sub->add_option("--score-window", "after-learning | from-start");
  sub->add_option("--grid-points", "Grid size for the MLE and Bayes preliminaries");
  sub->add_option("--stride", "Path output stride (0 = default)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"One-step and two-step MLE-processes for nonlinear AR Markov sequences"};
  app.require_subcommand(1);
  std::string config_path, out_dir;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON config; flags override its keys");
    sub->add_option("--output-dir", out_dir, "Output directory (default $MLEP_OUTPUT_DIR or .)");
    sub->add_option("--format", "csv | json");
  };

  CLI::App* sim = app.add_subcommand("simulate", "Simulate a trajectory");
  common(sim);
  sim->add_option("--model", "example1 | example2 | linear");
  sim->add_option("--theta", "True parameter")->expected(1, 16);
  sim->add_option("--n", "Number of transitions");
  sim->add_option("--seed", "RNG seed");
  sim->add_option("--burn-in", "Discarded initial steps (default 1000)");
  sim->add_option("--x-init", "Starting state (default 0)");

  CLI::App* est = app.add_subcommand("estimate", "Run a preliminary estimator and an MLE-process");
  common(est);
  add_trajectory_source(est);
  add_pipeline(est);

  CLI::App* kde = app.add_subcommand("kde", "Gaussian kernel estimate of the invariant density");
  common(kde);
  add_trajectory_source(kde);
  kde->add_option("--bandwidth", "Kernel width (default n^-1/5)");
  kde->add_option("--grid-points", "Number of grid points (default 512)");
  kde->add_option("--lower", "Grid start");
  kde->add_option("--upper", "Grid end");

  CLI::App* mc = app.add_subcommand("mc", "Monte Carlo study from a config file");
  mc->add_option("--config", config_path, "McConfig JSON")->required();
  mc->add_option("--output-dir", out_dir, "Output directory (default $MLEP_OUTPUT_DIR or .)");
  mc->add_option("--model", "Model name");
  mc->add_option("--theta0", "True parameter")->expected(1, 16);
  mc->add_option("--n", "Sample size");
  mc->add_option("--replications", "Number of replications");
  mc->add_option("--base-seed", "Seed of replication 0");
  mc->add_option("--workers", "Worker threads (default: available cores)");
  mc->add_option("--oracle-n", "Length of the reference-information run");
  mc->add_option("--burn-in", "Discarded initial steps");
  add_pipeline(mc);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsage;
  }

  CLI::App* sub = app.get_subcommands().front();
  try {
    const bool nested = sub == est || sub == mc;
    json cfg = resolve_config(*sub, config_path, nested);
    const fs::path dir = output_dir(out_dir);
    if (sub == sim) return run_simulate(std::move(cfg), dir);
    if (sub == est) return run_estimate(std::move(cfg), dir);
    if (sub == kde) return run_kde(std::move(cfg), dir);
    return run_mc(std::move(cfg), dir);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << sub->help();
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const json::exception& e) {
    std::cerr << "error: bad configuration value: " << e.what() << '\n';
    return kUsage;
  } catch (const mlep::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
