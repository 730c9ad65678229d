#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "doctest.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path kWork = MLEP_CLI_WORK;

// Runs the CLI with output in a fresh directory; returns the exit status.
int run(const std::string& args, const fs::path& dir) {
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string cmd = std::string("\"") + MLEP_CLI_PATH + "\" " + args + " --output-dir \"" +
                          dir.string() + "\" > \"" + (dir / "stdout.txt").string() + "\" 2> \"" +
                          (dir / "stderr.txt").string() + "\"";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::vector<std::string> lines(const fs::path& file) {
  std::ifstream in(file);
  std::vector<std::string> out;
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::string slurp(const fs::path& file) {
  std::ifstream in(file);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json read_json(const fs::path& file) { return json::parse(slurp(file)); }

json config_line(const std::string& line) {
  REQUIRE(line.rfind("# config: ", 0) == 0);
  return json::parse(line.substr(10));
}

}  // namespace

TEST_CASE("simulate writes n + 1 states") {
  const fs::path dir = kWork / "simulate";
  REQUIRE(run("simulate --model example2 --theta 0.5 --n 10000 --seed 1", dir) == 0);
  const auto rows = lines(dir / "trajectory.csv");
  REQUIRE(rows.size() == 10003);
  const json cfg = config_line(rows[0]);
  CHECK(cfg["model_name"] == "example2");
  CHECK(cfg["seed"] == 1);
  CHECK(rows[1] == "index,x");
  CHECK(rows[2].rfind("0,", 0) == 0);
  CHECK(rows.back().rfind("10000,", 0) == 0);
}

TEST_CASE("simulate without a model is a usage error") {
  const fs::path dir = kWork / "no_model";
  CHECK(run("simulate --theta 0.5 --n 100 --seed 1", dir) == 2);
  CHECK(slurp(dir / "stderr.txt").find("--model") != std::string::npos);
  CHECK_FALSE(fs::exists(dir / "trajectory.csv"));
  CHECK(run("simulate --model nosuch --theta 0.5 --n 100 --seed 1", dir) == 2);
  CHECK(run("frobnicate", dir) == 2);
}

TEST_CASE("simulate JSON carries metadata and matches the CSV") {
  const fs::path dir = kWork / "simulate_json";
  REQUIRE(run("simulate --model example2 --theta 0.5 --n 50 --seed 9 --format json", dir) == 0);
  const json j = read_json(dir / "trajectory.json");
  CHECK(j["observations"].size() == 51);
  CHECK(j["model_name"] == "example2");
  CHECK(j["config"]["n"] == 50);

  const fs::path csv_dir = kWork / "simulate_csv";
  REQUIRE(run("simulate --model example2 --theta 0.5 --n 50 --seed 9", csv_dir) == 0);
  const auto rows = lines(csv_dir / "trajectory.csv");
  const std::string last = rows.back();
  CHECK(std::stod(last.substr(last.find(',') + 1)) == j["observations"][50].get<double>());
}

TEST_CASE("config file values are overridden by flags") {
  const fs::path dir = kWork / "config";
  fs::create_directories(kWork);
  const fs::path cfg = kWork / "sim_config.json";
  std::ofstream(cfg) << R"({"model": "example2", "theta": 0.5, "n": 40, "seed": 3})";
  REQUIRE(run("simulate --config \"" + cfg.string() + "\" --n 20", dir) == 0);
  CHECK(lines(dir / "trajectory.csv").size() == 23);
}

TEST_CASE("estimate reports the learning interval") {
  const fs::path dir = kWork / "estimate_178";
  REQUIRE(run("estimate --model example2 --theta 0.5 --n 1000 --seed 4 --delta 0.75", dir) == 0);
  const json s = read_json(dir / "summary.json");
  CHECK(s["learning_length"] == 178);
  CHECK(s["n"] == 1000);
  CHECK(std::abs(s["terminal"][0].get<double>() - 0.5) < 0.3);
  CHECK(s["config"]["pipeline"]["process"] == "one-step");

  const fs::path dir2 = kWork / "estimate_32";
  REQUIRE(run("estimate --model example2 --theta 0.5 --n 10000 --seed 4 --delta 0.375 "
              "--preliminary bayes --process two-step --fisher-window running",
              dir2) == 0);
  const json s2 = read_json(dir2 / "summary.json");
  CHECK(s2["learning_length"] == 32);
  CHECK(s2["preliminary"]["kind"] == "bayes");
}

TEST_CASE("example1 path covers k = N+1 .. n") {
  const fs::path traj_dir = kWork / "example1_traj";
  REQUIRE(run("simulate --model example1 --theta 2.5 --n 2000 --seed 5", traj_dir) == 0);
  const fs::path dir = kWork / "example1_path";
  REQUIRE(run("estimate --input \"" + (traj_dir / "trajectory.csv").string() +
                  "\" --delta 0.75 --preliminary mle",
              dir) == 0);
  const auto rows = lines(dir / "path.csv");
  const json cfg = config_line(rows[0]);
  CHECK(cfg["model"] == "example1");
  CHECK(rows[1] == "k,s,theta_1,kind");
  const std::size_t big_n = 299;  // round(2000^0.75)
  REQUIRE(rows.size() == 2 + (2000 - big_n));
  CHECK(rows[2].rfind(std::to_string(big_n + 1) + ",", 0) == 0);
  CHECK(rows.back().rfind("2000,1,", 0) == 0);
  CHECK(rows.back().find(",one-step") != std::string::npos);
}

TEST_CASE("kde writes one row per grid point and echoes the bandwidth") {
  const fs::path dir = kWork / "kde";
  REQUIRE(run("kde --model linear --theta 0.5 --n 1000 --seed 6 --grid-points 64 --bandwidth 0.3", dir) == 0);
  const auto rows = lines(dir / "density.csv");
  REQUIRE(rows.size() == 66);
  CHECK(config_line(rows[0])["bandwidth"] == 0.3);
  CHECK(rows[1] == "x,density");

  REQUIRE(run("kde --model linear --theta 0.5 --n 1000 --seed 6 --lower -3 --upper 3 --grid-points 7", dir) == 0);
  const auto rows2 = lines(dir / "density.csv");
  REQUIRE(rows2.size() == 9);
  CHECK(config_line(rows2[0])["bandwidth"].get<double>() == doctest::Approx(std::pow(1000.0, -0.2)));
  CHECK(rows2[2].rfind("-3,", 0) == 0);

  CHECK(run("kde --model linear --theta 0.5 --n 100 --seed 6 --bandwidth 0", dir) == 2);
}

TEST_CASE("mc is deterministic and echoes its config") {
  fs::create_directories(kWork);
  const fs::path cfg = kWork / "mc_config.json";
  std::ofstream(cfg) << R"({"model": "example2", "theta0": 0.5, "n": 1000, "delta": 0.75,
                           "replications": 8, "base_seed": 11, "oracle_n": 20000,
                           "pipeline": {"preliminary": "emm", "process": "one-step"}})";
  const fs::path a = kWork / "mc_a", b = kWork / "mc_b";
  REQUIRE(run("mc --config \"" + cfg.string() + "\" --workers 1", a) == 0);
  REQUIRE(run("mc --config \"" + cfg.string() + "\" --workers 3", b) == 0);
  // Identical apart from the echoed worker count.
  const auto rows_a = lines(a / "mc_errors.csv"), rows_b = lines(b / "mc_errors.csv");
  CHECK(std::vector(rows_a.begin() + 1, rows_a.end()) == std::vector(rows_b.begin() + 1, rows_b.end()));
  CHECK(config_line(rows_b[0])["workers"] == 3);
  const json ra = read_json(a / "mc_report.json");
  CHECK(ra["config"]["replications"] == 8);
  CHECK(ra["config"]["base_seed"] == 11);
  CHECK(ra["terminal_errors"] == read_json(b / "mc_report.json")["terminal_errors"]);
  CHECK(config_line(lines(a / "mc_errors.csv")[0])["n"] == 1000);

  REQUIRE(run("mc --config \"" + cfg.string() + "\" --replications 4", a) == 0);
  CHECK(read_json(a / "mc_report.json")["config"]["replications"] == 4);

  CHECK(run("mc --n 100", a) == 2);  // config file is required
}

TEST_CASE("mc failures propagate as a nonzero exit") {
  fs::create_directories(kWork);
  const fs::path cfg = kWork / "mc_fail.json";
  // N = round(50^0.2) = 2 transitions: the observed Fisher is often negative.
  std::ofstream(cfg) << R"({"model": "example2", "theta0": 0.5, "n": 50, "delta": 0.2,
                           "replications": 4, "oracle_n": 1000,
                           "pipeline": {"preliminary": "emm", "process": "two-step",
                                        "fisher_window": "learning"}})";
  const fs::path dir = kWork / "mc_fail";
  const int code = run("mc --config \"" + cfg.string() + "\"", dir);
  CHECK(code == 3);
  CHECK(slurp(dir / "stderr.txt").find("replications failed") != std::string::npos);
  CHECK_FALSE(fs::exists(dir / "mc_report.json"));
}
