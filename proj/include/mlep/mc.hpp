#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mlep/model.hpp"
#include "mlep/preliminary.hpp"
#include "mlep/process.hpp"

namespace mlep {

/// Preliminary estimator followed by an optional correction process.
/// Without a process the preliminary value itself is the terminal estimate.
struct Pipeline {
  PreliminaryKind preliminary = PreliminaryKind::Emm;
  std::optional<ProcessKind> process = ProcessKind::OneStep;
  ProcessOptions options;
  std::size_t grid_points = kDefaultGridPoints;

  std::string label() const;
};

struct McConfig {
  std::string model_name = "example2";
  Vector theta0 = scalar(0.5);
  std::size_t n = 10'000;
  double delta = 0.75;
  Pipeline pipeline;
  std::size_t replications = 300;
  std::uint64_t base_seed = 1;
  std::size_t burn_in = 1000;
  double x_init = 0.0;
  /// Length of the single long run behind the reference information.
  std::size_t oracle_n = 1'000'000;
  std::uint64_t oracle_seed = 0x6f7261636c65ULL;
  /// Worker threads; 0 uses std::thread::hardware_concurrency().
  std::size_t workers = 0;
};

void validate(const McConfig& cfg, const ModelSpec& model);

struct ReplicationFailure {
  std::size_t replication = 0;
  std::uint64_t seed = 0;
  std::string message;
};

struct QuantileRow {
  double level = 0.0;
  double empirical = 0.0;
  /// Quantile of N(0, reference variance); empty when no reference exists.
  std::optional<double> gaussian;
};

struct McReport {
  McConfig config;
  std::size_t learning_length = 0;
  /// One row per successful replication: √n(θ̂_n - θ₀).
  Matrix terminal_errors;
  std::vector<std::uint64_t> seeds;
  std::vector<ReplicationFailure> failures;
  Matrix empirical_covariance;
  /// Plug-in Fisher at θ₀ on the oracle run, and its inverse.
  std::optional<Matrix> reference_information;
  std::optional<Matrix> reference_information_inverse;
  std::string reference_note;
  /// Per coordinate, at levels 5, 25, 50, 75, 95 %.
  std::vector<std::vector<QuantileRow>> quantiles;
};

inline constexpr double kMaxFailureFraction = 0.10;

/// Plug-in Fisher at θ₀ on one long trajectory; cached per (model, θ₀, length, seed).
Matrix oracle_information(const ModelSpec& model, const Vector& theta0, std::size_t n_oracle,
                          std::uint64_t seed, std::size_t burn_in = 1000);

/// Terminal estimate of one replication with the given seed.
Vector run_replication(const McConfig& cfg, const ModelSpec& model, std::uint64_t seed);

/// M replications with seeds base_seed + i. Failed replications are recorded
/// and skipped; more than 10 % failures raises StudyError.
McReport run_study(const McConfig& cfg, const ModelSpec& model);
McReport run_study(const McConfig& cfg);

struct ComparisonRow {
  std::string label;
  std::size_t learning_length = 0;
  /// Diagonal of the empirical covariance of √n(θ̂_n - θ₀).
  Vector variance;
  /// variance · N/n, the error variance on the preliminary estimator's own √N scale.
  Vector rate_adjusted_variance;
  std::vector<std::vector<QuantileRow>> quantiles;
  std::size_t failures = 0;
};

struct ComparisonTable {
  std::vector<ComparisonRow> rows;
  std::optional<Matrix> reference_information_inverse;
};

/// Runs each config; they must share model, θ₀, n, replications and seeds.
ComparisonTable compare_estimators(const std::vector<McConfig>& cfgs, const ModelSpec& model);
ComparisonTable compare_estimators(const std::vector<McConfig>& cfgs);
ComparisonTable summarize(const std::vector<McReport>& reports);

/// Sample quantile with linear interpolation between order statistics.
double empirical_quantile(std::vector<double> values, double level);

/// Keys preliminary, process ("none" allowed), fisher, fisher_window,
/// score_window, grid_points; missing keys take the defaults. Stride lives
/// outside the pipeline object.
nlohmann::json to_json(const Pipeline& p);
Pipeline pipeline_from_json(const nlohmann::json& j);

nlohmann::json to_json(const McConfig& cfg);
McConfig mc_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const McReport& report);
nlohmann::json to_json(const ComparisonTable& table);
/// `replication,seed,error_1..error_d`, preceded by `# config: {...}`.
void write_csv(std::ostream& os, const McReport& report);

}  // namespace mlep
