#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mlep/model.hpp"

namespace mlep {

/// Observations X_0..X_n with the settings that produced them.
struct Trajectory {
  std::vector<double> observations;
  Vector true_theta;
  std::uint64_t seed = 0;
  std::size_t burn_in = 0;
  std::string model_name;

  /// Number of transitions n (observations has n + 1 entries).
  std::size_t n() const { return observations.empty() ? 0 : observations.size() - 1; }
  double operator[](std::size_t j) const { return observations[j]; }
};

struct SimulationOptions {
  std::size_t burn_in = 1000;
  double x_init = 0.0;
};

/// Run the chain burn_in + n + 1 steps from x_init and keep the last n + 1
/// states. Deterministic in (model, theta, n, seed, options).
/// Throws DivergenceError at the first non-finite state.
Trajectory simulate(const ModelSpec& model, const Vector& theta, std::size_t n,
                    std::uint64_t seed, const SimulationOptions& options = {});

/// Checks the Trajectory invariants (length ≥ 2, finite entries).
void validate(const Trajectory& traj);

// Serialization. CSV carries a leading `# config: {...}` metadata line,
// then `index,x`, with 17 significant digits.
nlohmann::json to_json(const Trajectory& traj);
Trajectory trajectory_from_json(const nlohmann::json& j);
void write_csv(std::ostream& os, const Trajectory& traj);
Trajectory read_trajectory_csv(std::istream& is);

/// Reads CSV or JSON depending on the file extension.
Trajectory load_trajectory(const std::string& path);

}  // namespace mlep
