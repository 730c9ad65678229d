#include "mlep/likelihood.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace mlep {

void validate(const ScoreWindow& window, const Trajectory& traj) {
  if (window.start < 1 || window.start > window.end || window.end > traj.n())
    throw std::invalid_argument("score window [" + std::to_string(window.start) + ", " +
                                std::to_string(window.end) + "] invalid for n = " +
                                std::to_string(traj.n()));
}

double ell(const Vector& theta, double x_prev, double x_next, const ModelSpec& model) {
  return model.noise.log_density(x_next - model.drift.value(theta, x_prev));
}

Vector ell_dot(const Vector& theta, double x_prev, double x_next, const ModelSpec& model) {
  const double u = x_next - model.drift.value(theta, x_prev);
  return -model.noise.score(u) * model.drift.gradient(theta, x_prev);
}

Matrix ell_ddot(const Vector& theta, double x_prev, double x_next, const ModelSpec& model) {
  const double u = x_next - model.drift.value(theta, x_prev);
  const Vector ds = model.drift.gradient(theta, x_prev);
  return model.noise.score_derivative(u) * (ds * ds.transpose()) -
         model.noise.score(u) * model.drift.hessian(theta, x_prev);
}

double log_likelihood(const Vector& theta, const Trajectory& traj, const ScoreWindow& window,
                      const ModelSpec& model) {
  validate(window, traj);
  double sum = 0.0;
  for (std::size_t j = window.start; j <= window.end; ++j) sum += ell(theta, traj[j - 1], traj[j], model);
  return sum;
}

Vector score(const Vector& theta, const Trajectory& traj, const ScoreWindow& window,
             const ModelSpec& model) {
  validate(window, traj);
  Vector sum = Vector::Zero(model.dim());
  for (std::size_t j = window.start; j <= window.end; ++j) sum += ell_dot(theta, traj[j - 1], traj[j], model);
  return sum / std::sqrt(static_cast<double>(window.end));
}

}  // namespace mlep
