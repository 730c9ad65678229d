#pragma once

#include <cstddef>
#include <functional>
#include <string_view>

#include <nlohmann/json.hpp>

#include "mlep/model.hpp"
#include "mlep/simulate.hpp"

namespace mlep {

enum class PreliminaryKind { Mle, Bayes, Emm };

std::string_view to_string(PreliminaryKind kind);
PreliminaryKind preliminary_kind_from_string(std::string_view name);

/// Consistent estimate from the learning interval X_0..X_N.
struct PreliminaryEstimate {
  Vector theta;
  PreliminaryKind kind = PreliminaryKind::Mle;
  std::size_t learning_length = 0;
  /// MLE: log-likelihood at the optimum. Bayes: log of the unnormalized
  /// posterior mass. EMM: sample mean of q.
  double diagnostic = 0.0;
  /// MLE only: every grid value tied, the estimate is the tie-break.
  bool flat_likelihood = false;
  /// The raw value was outside the shrunk closure of Θ and got clamped.
  bool projected = false;
};

/// N = round(n^delta), at least 2 and at most n - 1.
std::size_t learning_length(std::size_t n, double delta);

inline constexpr std::size_t kDefaultGridPoints = 512;
inline constexpr double kGoldenTolerance = 1e-8;

/// Maximizes Σ_{j=1}^{N} ℓ on a grid over Θ, then refines by golden-section
/// search on the cell around the best grid point. Ties go to the smaller θ.
/// Scalar θ only.
PreliminaryEstimate mle(const Trajectory& traj, std::size_t learning, const ModelSpec& model,
                        std::size_t grid_points = kDefaultGridPoints);

using Prior = std::function<double(double)>;

/// Uniform density on the model's parameter interval.
Prior uniform_prior(const ModelSpec& model);

/// Posterior mean under `prior` with the conditional likelihood of the first
/// N transitions, by Simpson's rule on a uniform grid in log-sum-exp form.
PreliminaryEstimate bayes(const Trajectory& traj, std::size_t learning, const ModelSpec& model,
                          const Prior& prior, std::size_t grid_points = kDefaultGridPoints);

/// Method of moments: h((1/N) Σ_{j=1}^{N} q(X_j)), projected onto Θ.
PreliminaryEstimate emm(const Trajectory& traj, std::size_t learning, const ModelSpec& model,
                        const std::function<double(double)>& q,
                        const std::function<Vector(double)>& h);

/// q = h = identity; the shift-parameter EMM used for example2.
PreliminaryEstimate emm_mean(const Trajectory& traj, std::size_t learning, const ModelSpec& model);

/// Dispatches on kind; Bayes uses the uniform prior and EMM the mean statistic.
PreliminaryEstimate preliminary_estimate(PreliminaryKind kind, const Trajectory& traj,
                                         std::size_t learning, const ModelSpec& model,
                                         std::size_t grid_points = kDefaultGridPoints);

nlohmann::json to_json(const PreliminaryEstimate& est);

}  // namespace mlep
