#pragma once

#include <cstddef>

#include "mlep/model.hpp"
#include "mlep/simulate.hpp"

namespace mlep {

/// Inclusive range [start, end] of transition indices j (transition j
/// pairs X_{j-1} with X_j).
struct ScoreWindow {
  std::size_t start = 1;
  std::size_t end = 1;

  std::size_t length() const { return end - start + 1; }
};

/// Throws std::invalid_argument unless 1 ≤ start ≤ end ≤ n.
void validate(const ScoreWindow& window, const Trajectory& traj);

/// ℓ(θ, x, x') = ln g(x' - S(θ, x)).
double ell(const Vector& theta, double x_prev, double x_next, const ModelSpec& model);

/// θ-gradient of ℓ: -ψ(u)·Ṡ(θ, x), u = x' - S(θ, x).
Vector ell_dot(const Vector& theta, double x_prev, double x_next, const ModelSpec& model);

/// θ-Hessian of ℓ: ψ'(u)·Ṡ Ṡᵀ - ψ(u)·S̈.
Matrix ell_ddot(const Vector& theta, double x_prev, double x_next, const ModelSpec& model);

/// Conditional log-likelihood Σ_{j ∈ window} ℓ(θ, X_{j-1}, X_j).
double log_likelihood(const Vector& theta, const Trajectory& traj, const ScoreWindow& window,
                      const ModelSpec& model);

/// Normalized score Δ_k = k^{-1/2} Σ_{j ∈ window} ℓ̇, with k = window.end.
Vector score(const Vector& theta, const Trajectory& traj, const ScoreWindow& window,
             const ModelSpec& model);

}  // namespace mlep
