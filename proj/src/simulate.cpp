#include "mlep/simulate.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "mlep/error.hpp"

namespace mlep {

Trajectory simulate(const ModelSpec& model, const Vector& theta, std::size_t n,
                    std::uint64_t seed, const SimulationOptions& options) {
  if (n < 1) throw std::invalid_argument("simulate: n must be at least 1");
  if (!model.domain.contains_interior(theta))
    throw std::invalid_argument("simulate: theta must lie in the interior of the parameter domain");

  Rng rng(seed);
  Trajectory traj;
  traj.true_theta = theta;
  traj.seed = seed;
  traj.burn_in = options.burn_in;
  traj.model_name = model.name;
  traj.observations.reserve(n + 1);

  const std::size_t total = options.burn_in + n + 1;
  double x = options.x_init;
  for (std::size_t step = 1; step <= total; ++step) {
    x = model.drift.value(theta, x) + model.noise.sample(rng);
    if (!std::isfinite(x)) throw DivergenceError(step, x);
    if (step > options.burn_in) traj.observations.push_back(x);
  }
  return traj;
}

void validate(const Trajectory& traj) {
  if (traj.observations.size() < 2)
    throw std::invalid_argument("trajectory needs at least two observations");
  for (std::size_t j = 0; j < traj.observations.size(); ++j) {
    if (!std::isfinite(traj.observations[j]))
      throw std::invalid_argument("trajectory entry " + std::to_string(j) + " is not finite");
  }
}

namespace {

nlohmann::json metadata(const Trajectory& traj) {
  return {{"model_name", traj.model_name},
          {"true_theta", std::vector<double>(traj.true_theta.begin(), traj.true_theta.end())},
          {"seed", traj.seed},
          {"burn_in", traj.burn_in}};
}

void apply_metadata(const nlohmann::json& j, Trajectory& traj) {
  traj.model_name = j.value("model_name", std::string{});
  const auto theta = j.value("true_theta", std::vector<double>{});
  traj.true_theta = Eigen::Map<const Vector>(theta.data(), static_cast<Eigen::Index>(theta.size()));
  traj.seed = j.value("seed", std::uint64_t{0});
  traj.burn_in = j.value("burn_in", std::size_t{0});
}

}  // namespace

nlohmann::json to_json(const Trajectory& traj) {
  nlohmann::json j = metadata(traj);
  j["observations"] = traj.observations;
  return j;
}

Trajectory trajectory_from_json(const nlohmann::json& j) {
  Trajectory traj;
  apply_metadata(j, traj);
  traj.observations = j.at("observations").get<std::vector<double>>();
  validate(traj);
  return traj;
}

void write_csv(std::ostream& os, const Trajectory& traj) {
  os << "# config: " << metadata(traj).dump() << '\n';
  os << "index,x\n";
  os << std::setprecision(17);
  for (std::size_t j = 0; j < traj.observations.size(); ++j)
    os << j << ',' << traj.observations[j] << '\n';
}

Trajectory read_trajectory_csv(std::istream& is) {
  Trajectory traj;
  std::string line;
  bool header_seen = false;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line.front() == '#') {
      constexpr std::string_view tag = "# config: ";
      if (line.rfind(tag, 0) == 0) apply_metadata(nlohmann::json::parse(line.substr(tag.size())), traj);
      continue;
    }
    if (!header_seen) {
      if (line != "index,x") throw std::invalid_argument("trajectory CSV: expected header 'index,x'");
      header_seen = true;
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw std::invalid_argument("trajectory CSV: malformed line " + std::to_string(line_no));
    traj.observations.push_back(std::stod(line.substr(comma + 1)));
  }
  validate(traj);
  return traj;
}

Trajectory load_trajectory(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open trajectory file '" + path + "'");
  if (path.size() >= 5 && path.substr(path.size() - 5) == ".json")
    return trajectory_from_json(nlohmann::json::parse(in));
  return read_trajectory_csv(in);
}

}  // namespace mlep
