#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "mlep/fisher.hpp"
#include "mlep/model.hpp"
#include "mlep/preliminary.hpp"
#include "mlep/simulate.hpp"

namespace mlep {

enum class ProcessKind { OneStep, SecondPreliminary, TwoStep, Recurrent, FullMle };

std::string_view to_string(ProcessKind kind);
ProcessKind process_kind_from_string(std::string_view name);

/// Where the information matrix for the correction at θ̄_N is estimated.
enum class FisherWindow {
  Learning,  ///< once, on transitions [1, N]
  Running,   ///< for every emitted k, on transitions [1, k]
};

/// First transition of the one-step score sum.
enum class ScoreStart {
  AfterLearning,  ///< Σ_{j=N+1}^{k}
  FromStart,      ///< Σ_{j=1}^{k}
};

std::string_view to_string(FisherWindow w);
FisherWindow fisher_window_from_string(std::string_view name);
std::string_view to_string(ScoreStart s);
ScoreStart score_start_from_string(std::string_view name);

struct ProcessOptions {
  FisherMethod fisher = FisherMethod::Observed;
  FisherWindow fisher_window = FisherWindow::Learning;
  /// Read by one_step_path only.
  ScoreStart score_start = ScoreStart::AfterLearning;
  /// 0 selects default_stride(n).
  std::size_t stride = 0;
};

struct PathEntry {
  std::size_t k = 0;
  Vector theta;
};

/// Estimates θ_k for an increasing set of k in (N, n].
struct EstimatorPath {
  std::vector<PathEntry> entries;
  ProcessKind kind = ProcessKind::OneStep;
  std::size_t learning_length = 0;
  std::optional<PreliminaryEstimate> preliminary;
  /// k values at which an intermediate estimate left Θ and was projected.
  std::vector<std::size_t> projected_at;

  const Vector& terminal() const { return entries.back().theta; }
};

/// Every k for n ≤ 10⁴, n/1000 above.
std::size_t default_stride(std::size_t n);

/// N+1, N+1+stride, ..., always ending with n.
std::vector<std::size_t> emitted_indices(std::size_t learning, std::size_t n, std::size_t stride);

/// θ*_k = θ̄_N + k^{-1/2} I(θ̄_N)^{-1} Δ_k(θ̄_N), the score summed over
/// [N+1, k] or [1, k] per options.score_start.
EstimatorPath one_step_path(const Trajectory& traj, const ModelSpec& model,
                            const PreliminaryEstimate& prelim, const ProcessOptions& options = {});

/// As one_step_path with the score always summed over [1, k].
EstimatorPath second_preliminary_path(const Trajectory& traj, const ModelSpec& model,
                                      const PreliminaryEstimate& prelim,
                                      const ProcessOptions& options = {});

/// θ**_k = θ̄_{k,2} + k^{-1/2} I(θ̄_{k,2})^{-1} Δ_k(θ̄_{k,2}, X^k), with the
/// second Fisher estimate taken on [1, k] at θ̄_{k,2}.
EstimatorPath two_step_path(const Trajectory& traj, const ModelSpec& model,
                            const PreliminaryEstimate& prelim, const ProcessOptions& options = {});

/// Online form θ_{k+1} = k/(k+1) θ_k + θ̄_N/(k+1) + I(θ̄_N)^{-1} ℓ̇(θ̄_N, X_k, X_{k+1})/(k+1).
/// Starts from the empty sum at k = 0 (matches second_preliminary_path) or,
/// when `windowed`, at k = N (matches one_step_path with AfterLearning).
/// Needs the frozen learning-window Fisher.
EstimatorPath recurrent_path(const Trajectory& traj, const ModelSpec& model,
                             const PreliminaryEstimate& prelim, const ProcessOptions& options = {},
                             bool windowed = false);

/// Grid + golden-section MLE on the first k transitions for each checkpoint.
EstimatorPath full_mle_path(const Trajectory& traj, const ModelSpec& model,
                            std::size_t grid_points, const std::vector<std::size_t>& checkpoints);

/// Dispatches on kind. FullMle ignores the preliminary and evaluates at the
/// indices emitted_indices() would produce.
EstimatorPath estimator_path(ProcessKind kind, const Trajectory& traj, const ModelSpec& model,
                             const PreliminaryEstimate& prelim, const ProcessOptions& options = {},
                             std::size_t grid_points = kDefaultGridPoints);

/// `k,s,theta_1..theta_d,kind` with s = k/n, preceded by `# config: {...}`.
void write_csv(std::ostream& os, const EstimatorPath& path, std::size_t n,
               const nlohmann::json& config);
nlohmann::json to_json(const EstimatorPath& path, std::size_t n, const nlohmann::json& config);

}  // namespace mlep
