#include "mlep/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace mlep {

ParamDomain::ParamDomain(Vector lower, Vector upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.size() < 1 || lower_.size() != upper_.size())
    throw std::invalid_argument("ParamDomain: bounds must be non-empty and of equal length");
  for (Eigen::Index i = 0; i < lower_.size(); ++i) {
    if (!std::isfinite(lower_[i]) || !std::isfinite(upper_[i]) || !(lower_[i] < upper_[i]))
      throw std::invalid_argument("ParamDomain: need finite lower[i] < upper[i]");
  }
}

ParamDomain::ParamDomain(double lower, double upper)
    : ParamDomain(Vector::Constant(1, lower), Vector::Constant(1, upper)) {}

bool ParamDomain::contains_interior(const Vector& theta) const {
  if (theta.size() != dim()) return false;
  return ((theta.array() > lower_.array()) && (theta.array() < upper_.array())).all();
}

bool ParamDomain::contains_closure(const Vector& theta) const {
  if (theta.size() != dim()) return false;
  return ((theta.array() >= lower_.array()) && (theta.array() <= upper_.array())).all();
}

Vector ParamDomain::project(const Vector& theta, double margin) const {
  if (theta.size() != dim()) throw std::invalid_argument("ParamDomain::project: dimension mismatch");
  const Vector pad = margin * (upper_ - lower_);
  const Vector lo = lower_ + pad;
  const Vector hi = upper_ - pad;
  Vector out(theta.size());
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    // NaN goes to the lower edge rather than propagating.
    out[i] = std::isnan(theta[i]) ? lo[i] : std::clamp(theta[i], lo[i], hi[i]);
  }
  return out;
}

NoiseDensity gaussian_noise(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma))
    throw std::invalid_argument("gaussian_noise: sigma must be positive");
  const double var = sigma * sigma;
  const double log_norm = -0.5 * std::log(2.0 * std::numbers::pi * var);
  NoiseDensity g;
  g.log_density = [=](double u) { return log_norm - 0.5 * u * u / var; };
  g.density = [=](double u) { return std::exp(log_norm - 0.5 * u * u / var); };
  g.score = [=](double u) { return -u / var; };
  g.score_derivative = [=](double) { return -1.0 / var; };
  g.sample = [=](Rng& rng) { return sigma * standard_normal(rng); };
  g.support_lower = -12.0 * sigma;
  g.support_upper = 12.0 * sigma;
  return g;
}

ModelSpec example1_model() {
  Drift s;
  s.value = [](const Vector& th, double x) { return x * x / (1.0 + th[0] * std::abs(x)); };
  s.gradient = [](const Vector& th, double x) {
    const double a = std::abs(x);
    const double den = 1.0 + th[0] * a;
    return Vector::Constant(1, -a * a * a / (den * den));
  };
  s.hessian = [](const Vector& th, double x) {
    const double a = std::abs(x);
    const double den = 1.0 + th[0] * a;
    return Matrix::Constant(1, 1, 2.0 * a * a * a * a / (den * den * den));
  };
  return ModelSpec{std::move(s), gaussian_noise(), ParamDomain(2.0, 5.0), "example1"};
}

ModelSpec example2_model() {
  Drift s;
  s.value = [](const Vector& th, double x) {
    const double d = th[0] - x;
    return x + 3.0 * d / (1.0 + d * d);
  };
  s.gradient = [](const Vector& th, double x) {
    const double d = th[0] - x;
    const double q = 1.0 + d * d;
    return Vector::Constant(1, 3.0 * (1.0 - d * d) / (q * q));
  };
  s.hessian = [](const Vector& th, double x) {
    const double d = th[0] - x;
    const double q = 1.0 + d * d;
    return Matrix::Constant(1, 1, 6.0 * d * (d * d - 3.0) / (q * q * q));
  };
  return ModelSpec{std::move(s), gaussian_noise(), ParamDomain(-1.0, 1.0), "example2"};
}

ModelSpec linear_test_model(double lower, double upper) {
  if (!(lower > -1.0) || !(upper < 1.0))
    throw std::invalid_argument("linear_test_model: domain must lie inside (-1, 1) for ergodicity");
  Drift s;
  s.value = [](const Vector& th, double x) { return th[0] * x; };
  s.gradient = [](const Vector&, double x) { return Vector::Constant(1, x); };
  s.hessian = [](const Vector&, double) { return Matrix::Zero(1, 1); };
  return ModelSpec{std::move(s), gaussian_noise(), ParamDomain(lower, upper), "linear"};
}

double linear_fisher_information(double theta) { return 1.0 / (1.0 - theta * theta); }

ModelSpec zero_drift_model() {
  Drift s;
  s.value = [](const Vector&, double) { return 0.0; };
  s.gradient = [](const Vector& th, double) { return Vector::Zero(th.size()); };
  s.hessian = [](const Vector& th, double) { return Matrix::Zero(th.size(), th.size()); };
  return ModelSpec{std::move(s), gaussian_noise(), ParamDomain(-1.0, 1.0), "zero"};
}

ModelSpec model_by_name(std::string_view name) {
  if (name == "example1") return example1_model();
  if (name == "example2") return example2_model();
  if (name == "linear") return linear_test_model();
  throw std::invalid_argument("unknown model '" + std::string(name) +
                              "' (expected example1, example2, linear)");
}

}  // namespace mlep
