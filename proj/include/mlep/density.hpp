#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "mlep/simulate.hpp"

namespace mlep {

struct DensityEstimate {
  std::vector<double> grid;
  std::vector<double> values;
  double bandwidth = 0.0;
  std::size_t n_used = 0;
};

/// Rule-of-thumb width h_n = n^{-1/5}.
double default_bandwidth(std::size_t n);

/// `points` equally spaced values from min(X) - 4h to max(X) + 4h.
std::vector<double> default_grid(std::span<const double> sample, double bandwidth,
                                 std::size_t points = 512);

/// Gaussian kernel estimate (1/(n h)) Σ K((X_j - x)/h) of the sample.
DensityEstimate kde(std::span<const double> sample, std::span<const double> grid,
                    std::optional<double> bandwidth = std::nullopt);

/// Uses X_1..X_n of the trajectory (X_0 is the conditioning value).
DensityEstimate kde(const Trajectory& traj, std::span<const double> grid,
                    std::optional<double> bandwidth = std::nullopt);

/// Trapezoid rule over the estimate's grid.
double trapezoid_mass(const DensityEstimate& est);

/// `x,density` rows preceded by `# config: {...}`.
void write_csv(std::ostream& os, const DensityEstimate& est, const nlohmann::json& config);

}  // namespace mlep
