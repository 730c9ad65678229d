#pragma once
// Test-only oracles and fixtures.

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "mlep/model.hpp"
#include "mlep/simulate.hpp"

namespace mlep::testing {

/// Central difference of a scalar function of θ along coordinate i.
inline double central_difference(const std::function<double(const Vector&)>& f, const Vector& theta,
                                 Eigen::Index i, double h = 1e-5) {
  Vector up = theta;
  Vector down = theta;
  up[i] += h;
  down[i] -= h;
  return (f(up) - f(down)) / (2.0 * h);
}

/// |a - b| ≤ rel·max(|a|, |b|) + abs.
inline bool close(double a, double b, double rel, double abs = 1e-9) {
  return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b)) + abs;
}

/// Composite Simpson rule on [a, b] with `cells` (even) subintervals.
inline double simpson(const std::function<double(double)>& f, double a, double b, int cells = 20000) {
  const double h = (b - a) / cells;
  double s = f(a) + f(b);
  for (int i = 1; i < cells; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + h * i);
  return s * h / 3.0;
}

/// Interior point drawn uniformly from the box shrunk by 5 % on each side.
inline Vector random_interior(const ParamDomain& dom, std::mt19937_64& rng) {
  Vector t(dom.dim());
  for (Eigen::Index i = 0; i < dom.dim(); ++i) {
    const double pad = 0.05 * (dom.upper()[i] - dom.lower()[i]);
    std::uniform_real_distribution<double> u(dom.lower()[i] + pad, dom.upper()[i] - pad);
    t[i] = u(rng);
  }
  return t;
}

/// Linear AR(1) driven by zero noise: X_j = θ X_{j-1} exactly, while the
/// likelihood still uses the standard Gaussian density.
inline ModelSpec noiseless_linear_model() {
  ModelSpec m = linear_test_model();
  m.noise.sample = [](Rng&) { return 0.0; };
  m.name = "linear-noiseless";
  return m;
}

/// Hand-built trajectory from explicit observations.
inline Trajectory make_trajectory(std::vector<double> xs, double theta = 0.0,
                                  std::string name = "fixture") {
  Trajectory t;
  t.observations = std::move(xs);
  t.true_theta = scalar(theta);
  t.model_name = std::move(name);
  return t;
}

/// Two-parameter fixture S(θ, x) = θ₁ x / (1 + θ₂ x²) on (-0.9, 0.9) × (0.1, 2),
/// with a non-diagonal Hessian.
inline ModelSpec two_parameter_model() {
  Drift s;
  s.value = [](const Vector& t, double x) { return t[0] * x / (1.0 + t[1] * x * x); };
  s.gradient = [](const Vector& t, double x) {
    const double q = 1.0 + t[1] * x * x;
    Vector g(2);
    g << x / q, -t[0] * x * x * x / (q * q);
    return g;
  };
  s.hessian = [](const Vector& t, double x) {
    const double q = 1.0 + t[1] * x * x;
    Matrix h(2, 2);
    const double cross = -x * x * x / (q * q);
    h << 0.0, cross, cross, 2.0 * t[0] * std::pow(x, 5) / (q * q * q);
    return h;
  };
  Vector lo(2), hi(2);
  lo << -0.9, 0.1;
  hi << 0.9, 2.0;
  return ModelSpec{std::move(s), gaussian_noise(), ParamDomain(lo, hi), "two-parameter"};
}

}  // namespace mlep::testing
