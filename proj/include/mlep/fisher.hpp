#pragma once

#include <cstddef>
#include <string_view>

#include <nlohmann/json.hpp>

#include "mlep/likelihood.hpp"
#include "mlep/model.hpp"
#include "mlep/simulate.hpp"

namespace mlep {

enum class FisherMethod {
  Observed,    ///< -(1/m) Σ ℓ̈
  PlugIn,      ///< (1/m) Σ ℓ̇ ℓ̇ᵀ
  Factorized,  ///< I_g · (1/m) Σ Ṡ Ṡᵀ
};

std::string_view to_string(FisherMethod method);
FisherMethod fisher_method_from_string(std::string_view name);

/// Symmetric positive-definite information estimate.
struct FisherMatrix {
  Matrix matrix;
  FisherMethod method = FisherMethod::Observed;
  std::size_t sample_size = 0;
};

/// Noise information I_g = ∫ ψ(u)² g(u) du over the noise support window.
double i_g(const NoiseDensity& noise);

/// Estimators averaged over the window length m = |window|. Each throws
/// DegenerateInformationError if the average is not positive-definite.
FisherMatrix observed_fisher(const Vector& theta, const Trajectory& traj, const ScoreWindow& window,
                             const ModelSpec& model);
FisherMatrix plugin_fisher(const Vector& theta, const Trajectory& traj, const ScoreWindow& window,
                           const ModelSpec& model);
FisherMatrix factorized_fisher(const Vector& theta, const Trajectory& traj,
                               const ScoreWindow& window, const ModelSpec& model);
FisherMatrix estimate_fisher(FisherMethod method, const Vector& theta, const Trajectory& traj,
                             const ScoreWindow& window, const ModelSpec& model);

/// Per-transition summand of the chosen estimator, before averaging.
/// `noise_information` is I_g and only read by the factorized method.
Matrix fisher_term(FisherMethod method, const Vector& theta, double x_prev, double x_next,
                   const ModelSpec& model, double noise_information);

/// Wraps an already averaged matrix, enforcing the positive-definite invariant.
FisherMatrix make_fisher_matrix(Matrix average, FisherMethod method, std::size_t sample_size);

/// Upper bound on the 2-norm condition number accepted by invert().
inline constexpr double kMaxConditionNumber = 1e10;

/// Inverse through a Cholesky factorization. Throws DegenerateInformationError
/// when the matrix is asymmetric, indefinite or worse conditioned than
/// kMaxConditionNumber.
Matrix invert(const FisherMatrix& fm);

nlohmann::json to_json(const FisherMatrix& fm);

}  // namespace mlep
