#pragma once

#include <functional>
#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "mlep/rng.hpp"

namespace mlep {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Open bounded box Θ = (lower, upper) in R^d.
class ParamDomain {
 public:
  ParamDomain(Vector lower, Vector upper);
  /// Scalar interval (lower, upper).
  ParamDomain(double lower, double upper);

  Eigen::Index dim() const { return lower_.size(); }
  const Vector& lower() const { return lower_; }
  const Vector& upper() const { return upper_; }

  bool contains_interior(const Vector& theta) const;
  bool contains_closure(const Vector& theta) const;

  /// Clamp onto the box shrunk by `margin * (upper - lower)` on each side.
  Vector project(const Vector& theta, double margin = kDefaultMargin) const;

  static constexpr double kDefaultMargin = 1e-6;

 private:
  Vector lower_;
  Vector upper_;
};

/// Drift S(θ, x) with its first two θ-derivatives.
struct Drift {
  std::function<double(const Vector& theta, double x)> value;
  std::function<Vector(const Vector& theta, double x)> gradient;
  std::function<Matrix(const Vector& theta, double x)> hessian;
};

/// Noise density g with score ψ = g'/g. `support` is the window used for
/// quadratures over u.
struct NoiseDensity {
  std::function<double(double)> density;
  std::function<double(double)> log_density;
  std::function<double(double)> score;
  std::function<double(double)> score_derivative;
  std::function<double(Rng&)> sample;
  double support_lower = -12.0;
  double support_upper = 12.0;
};

/// X_j = S(θ, X_{j-1}) + ε_j, ε_j i.i.d. with density g, θ ∈ Θ.
struct ModelSpec {
  Drift drift;
  NoiseDensity noise;
  ParamDomain domain;
  std::string name;

  Eigen::Index dim() const { return domain.dim(); }
};

/// N(0, sigma²) noise; the support window scales with sigma.
NoiseDensity gaussian_noise(double sigma = 1.0);

/// S(θ, x) = x² / (1 + θ|x|), Θ = (2, 5), standard Gaussian noise.
ModelSpec example1_model();

/// S(θ, x) = x + 3(θ - x) / (1 + (x - θ)²), Θ = (-1, 1), standard Gaussian noise.
ModelSpec example2_model();

/// Linear AR(1) fixture S(θ, x) = θx with Gaussian noise. The domain must
/// lie inside (-1, 1) so that the chain is ergodic. Stationary law
/// N(0, 1/(1-θ²)) and Fisher information 1/(1-θ²) are known exactly.
ModelSpec linear_test_model(double lower = -0.95, double upper = 0.95);

/// Exact Fisher information of the linear fixture.
double linear_fisher_information(double theta);

/// S ≡ 0 on Θ = (-1, 1). Carries no information about θ.
ModelSpec zero_drift_model();

/// Built-in lookup: "example1", "example2", "linear".
ModelSpec model_by_name(std::string_view name);

/// Convenience for scalar parameters.
inline Vector scalar(double v) { return Vector::Constant(1, v); }

}  // namespace mlep
