#include "mlep/density.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <stdexcept>

namespace mlep {

double default_bandwidth(std::size_t n) {
  if (n == 0) throw std::invalid_argument("default_bandwidth: empty sample");
  return std::pow(static_cast<double>(n), -0.2);
}

std::vector<double> default_grid(std::span<const double> sample, double bandwidth,
                                 std::size_t points) {
  if (sample.empty()) throw std::invalid_argument("default_grid: empty sample");
  if (points < 2) throw std::invalid_argument("default_grid: need at least two points");
  const auto [lo_it, hi_it] = std::minmax_element(sample.begin(), sample.end());
  const double lo = *lo_it - 4.0 * bandwidth;
  const double hi = *hi_it + 4.0 * bandwidth;
  std::vector<double> grid(points);
  for (std::size_t i = 0; i < points; ++i)
    grid[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
  return grid;
}

DensityEstimate kde(std::span<const double> sample, std::span<const double> grid,
                    std::optional<double> bandwidth) {
  if (sample.empty()) throw std::invalid_argument("kde: empty sample");
  if (grid.empty()) throw std::invalid_argument("kde: empty evaluation grid");
  if (!std::is_sorted(grid.begin(), grid.end()))
    throw std::invalid_argument("kde: evaluation grid must be ascending");
  const double h = bandwidth.value_or(default_bandwidth(sample.size()));
  if (!(h > 0.0) || !std::isfinite(h)) throw std::invalid_argument("kde: bandwidth must be positive");

  const double norm = 1.0 / (static_cast<double>(sample.size()) * h * std::sqrt(2.0 * std::numbers::pi));
  DensityEstimate est;
  est.grid.assign(grid.begin(), grid.end());
  est.values.resize(grid.size());
  est.bandwidth = h;
  est.n_used = sample.size();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double sum = 0.0;
    for (const double x : sample) {
      const double z = (x - grid[i]) / h;
      sum += std::exp(-0.5 * z * z);
    }
    est.values[i] = norm * sum;
  }
  return est;
}

DensityEstimate kde(const Trajectory& traj, std::span<const double> grid,
                    std::optional<double> bandwidth) {
  validate(traj);
  return kde(std::span<const double>(traj.observations).subspan(1), grid, bandwidth);
}

double trapezoid_mass(const DensityEstimate& est) {
  double mass = 0.0;
  for (std::size_t i = 1; i < est.grid.size(); ++i)
    mass += 0.5 * (est.values[i] + est.values[i - 1]) * (est.grid[i] - est.grid[i - 1]);
  return mass;
}

void write_csv(std::ostream& os, const DensityEstimate& est, const nlohmann::json& config) {
  nlohmann::json echo = config;
  echo["bandwidth"] = est.bandwidth;
  echo["n_used"] = est.n_used;
  os << "# config: " << echo.dump() << '\n';
  os << "x,density\n" << std::setprecision(17);
  for (std::size_t i = 0; i < est.grid.size(); ++i) os << est.grid[i] << ',' << est.values[i] << '\n';
}

}  // namespace mlep
