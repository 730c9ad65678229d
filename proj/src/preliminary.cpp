#include "mlep/preliminary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "mlep/error.hpp"
#include "mlep/likelihood.hpp"

namespace mlep {

std::string_view to_string(PreliminaryKind kind) {
  switch (kind) {
    case PreliminaryKind::Mle: return "mle";
    case PreliminaryKind::Bayes: return "bayes";
    case PreliminaryKind::Emm: return "emm";
  }
  return "mle";
}

PreliminaryKind preliminary_kind_from_string(std::string_view name) {
  if (name == "mle") return PreliminaryKind::Mle;
  if (name == "bayes") return PreliminaryKind::Bayes;
  if (name == "emm") return PreliminaryKind::Emm;
  throw std::invalid_argument("unknown preliminary estimator '" + std::string(name) +
                              "' (expected mle, bayes, emm)");
}

std::size_t learning_length(std::size_t n, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("learning_length: need 0 < delta < 1");
  if (n < 3) throw std::invalid_argument("learning_length: need n >= 3");
  const auto raw = static_cast<std::size_t>(std::llround(std::pow(static_cast<double>(n), delta)));
  return std::clamp<std::size_t>(raw, 2, n - 1);
}

namespace {

void require_scalar(const ModelSpec& model, const char* who) {
  if (model.dim() != 1)
    throw UnsupportedDimensionError(std::string(who) + ": only scalar parameters are supported");
}

void require_learning(const Trajectory& traj, std::size_t learning, const char* who) {
  if (learning < 1 || learning > traj.n())
    throw std::invalid_argument(std::string(who) + ": learning length must be in [1, n]");
}

struct Interval {
  double lo;
  double hi;
};

Interval shrunk_interval(const ModelSpec& model) {
  const double lo = model.domain.lower()[0];
  const double hi = model.domain.upper()[0];
  const double pad = ParamDomain::kDefaultMargin * (hi - lo);
  return {lo + pad, hi - pad};
}

std::vector<double> uniform_grid(Interval iv, std::size_t points) {
  std::vector<double> g(points);
  const double h = (iv.hi - iv.lo) / static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i) g[i] = iv.lo + h * static_cast<double>(i);
  g.back() = iv.hi;
  return g;
}

// Golden-section maximization of f on [a, b].
double golden_section_max(const std::function<double(double)>& f, double a, double b, double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

PreliminaryEstimate mle(const Trajectory& traj, std::size_t learning, const ModelSpec& model,
                        std::size_t grid_points) {
  require_scalar(model, "mle");
  require_learning(traj, learning, "mle");
  if (grid_points < 3) throw std::invalid_argument("mle: need at least 3 grid points");

  const ScoreWindow window{1, learning};
  const auto loglik = [&](double t) { return log_likelihood(scalar(t), traj, window, model); };

  const std::vector<double> grid = uniform_grid(shrunk_interval(model), grid_points);
  std::vector<double> values(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) values[i] = loglik(grid[i]);

  // Strict comparison keeps the first (smallest θ) among equal values.
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i] > values[best] || (std::isnan(values[best]) && !std::isnan(values[i]))) best = i;
  if (!(values[best] > -std::numeric_limits<double>::infinity()))
    throw NumericalError("mle: log-likelihood is -inf or undefined at every grid point");

  PreliminaryEstimate est;
  est.kind = PreliminaryKind::Mle;
  est.learning_length = learning;
  est.flat_likelihood = std::all_of(values.begin(), values.end(),
                                    [&](double v) { return v == values[best]; });
  if (est.flat_likelihood) {
    est.theta = scalar(grid[best]);
    est.diagnostic = values[best];
    return est;
  }

  const double a = grid[best == 0 ? 0 : best - 1];
  const double b = grid[std::min(best + 1, grid.size() - 1)];
  const double refined = golden_section_max(loglik, a, b, kGoldenTolerance);
  const double refined_value = loglik(refined);
  if (refined_value >= values[best]) {
    est.theta = scalar(refined);
    est.diagnostic = refined_value;
  } else {
    est.theta = scalar(grid[best]);
    est.diagnostic = values[best];
  }
  return est;
}

Prior uniform_prior(const ModelSpec& model) {
  require_scalar(model, "uniform_prior");
  const double lo = model.domain.lower()[0];
  const double hi = model.domain.upper()[0];
  return [=](double t) { return (t >= lo && t <= hi) ? 1.0 / (hi - lo) : 0.0; };
}

PreliminaryEstimate bayes(const Trajectory& traj, std::size_t learning, const ModelSpec& model,
                          const Prior& prior, std::size_t grid_points) {
  require_scalar(model, "bayes");
  require_learning(traj, learning, "bayes");
  if (grid_points < 3) throw std::invalid_argument("bayes: need at least 3 grid points");
  if (grid_points % 2 == 0) ++grid_points;  // Simpson needs an even number of cells

  const ScoreWindow window{1, learning};
  const std::vector<double> grid = uniform_grid(shrunk_interval(model), grid_points);
  std::vector<double> log_w(grid.size());
  double max_log = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double p = prior(grid[i]);
    if (p < 0.0 || std::isnan(p)) throw std::invalid_argument("bayes: prior must be non-negative");
    const double lw = p > 0.0 ? std::log(p) + log_likelihood(scalar(grid[i]), traj, window, model)
                              : -std::numeric_limits<double>::infinity();
    log_w[i] = std::isnan(lw) ? -std::numeric_limits<double>::infinity() : lw;
    max_log = std::max(max_log, log_w[i]);
  }
  if (!std::isfinite(max_log)) throw NumericalError("bayes: every posterior weight underflows");

  // Composite Simpson weights 1, 4, 2, 4, ..., 4, 1.
  double mass = 0.0;
  double moment = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double simpson = (i == 0 || i + 1 == grid.size()) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    const double w = simpson * std::exp(log_w[i] - max_log);
    mass += w;
    moment += w * grid[i];
  }
  if (!(mass > 0.0)) throw NumericalError("bayes: posterior mass vanished");

  const double h = (grid.back() - grid.front()) / static_cast<double>(grid.size() - 1);
  PreliminaryEstimate est;
  est.kind = PreliminaryKind::Bayes;
  est.learning_length = learning;
  est.diagnostic = max_log + std::log(mass * h / 3.0);
  const Vector raw = scalar(moment / mass);
  est.theta = model.domain.project(raw);
  est.projected = est.theta[0] != raw[0];
  return est;
}

PreliminaryEstimate emm(const Trajectory& traj, std::size_t learning, const ModelSpec& model,
                        const std::function<double(double)>& q,
                        const std::function<Vector(double)>& h) {
  require_learning(traj, learning, "emm");
  double sum = 0.0;
  for (std::size_t j = 1; j <= learning; ++j) sum += q(traj[j]);
  const double mean = sum / static_cast<double>(learning);

  Vector raw;
  try {
    raw = h(mean);
  } catch (const std::domain_error& e) {
    throw NumericalError(std::string("emm: h undefined at the sample mean: ") + e.what());
  }
  if (raw.size() != model.dim() || !raw.allFinite())
    throw NumericalError("emm: h undefined at the sample mean " + std::to_string(mean));

  PreliminaryEstimate est;
  est.kind = PreliminaryKind::Emm;
  est.learning_length = learning;
  est.diagnostic = mean;
  est.theta = model.domain.project(raw);
  est.projected = (est.theta.array() != raw.array()).any();
  return est;
}

PreliminaryEstimate emm_mean(const Trajectory& traj, std::size_t learning, const ModelSpec& model) {
  require_scalar(model, "emm_mean");
  return emm(traj, learning, model, [](double x) { return x; }, [](double m) { return scalar(m); });
}

PreliminaryEstimate preliminary_estimate(PreliminaryKind kind, const Trajectory& traj,
                                         std::size_t learning, const ModelSpec& model,
                                         std::size_t grid_points) {
  switch (kind) {
    case PreliminaryKind::Mle: return mle(traj, learning, model, grid_points);
    case PreliminaryKind::Bayes: return bayes(traj, learning, model, uniform_prior(model), grid_points);
    case PreliminaryKind::Emm: return emm_mean(traj, learning, model);
  }
  throw std::logic_error("preliminary_estimate: unreachable");
}

nlohmann::json to_json(const PreliminaryEstimate& est) {
  return {{"kind", to_string(est.kind)},
          {"theta", std::vector<double>(est.theta.begin(), est.theta.end())},
          {"learning_length", est.learning_length},
          {"diagnostic", est.diagnostic},
          {"flat_likelihood", est.flat_likelihood},
          {"projected", est.projected}};
}

}  // namespace mlep
