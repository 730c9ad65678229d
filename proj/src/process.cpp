#include "mlep/process.hpp"

#include <algorithm>
#include <iomanip>
#include <ostream>
#include <stdexcept>
#include <string>

#include "mlep/likelihood.hpp"

namespace mlep {

std::string_view to_string(ProcessKind kind) {
  switch (kind) {
    case ProcessKind::OneStep: return "one-step";
    case ProcessKind::SecondPreliminary: return "second-preliminary";
    case ProcessKind::TwoStep: return "two-step";
    case ProcessKind::Recurrent: return "recurrent";
    case ProcessKind::FullMle: return "full-mle";
  }
  return "one-step";
}

ProcessKind process_kind_from_string(std::string_view name) {
  if (name == "one-step") return ProcessKind::OneStep;
  if (name == "second-preliminary") return ProcessKind::SecondPreliminary;
  if (name == "two-step") return ProcessKind::TwoStep;
  if (name == "recurrent") return ProcessKind::Recurrent;
  if (name == "full-mle") return ProcessKind::FullMle;
  throw std::invalid_argument("unknown process '" + std::string(name) +
                              "' (expected one-step, second-preliminary, two-step, recurrent, full-mle)");
}

std::string_view to_string(FisherWindow w) { return w == FisherWindow::Learning ? "learning" : "running"; }

FisherWindow fisher_window_from_string(std::string_view name) {
  if (name == "learning") return FisherWindow::Learning;
  if (name == "running") return FisherWindow::Running;
  throw std::invalid_argument("unknown Fisher window '" + std::string(name) +
                              "' (expected learning, running)");
}

std::string_view to_string(ScoreStart s) {
  return s == ScoreStart::AfterLearning ? "after-learning" : "from-start";
}

ScoreStart score_start_from_string(std::string_view name) {
  if (name == "after-learning") return ScoreStart::AfterLearning;
  if (name == "from-start") return ScoreStart::FromStart;
  throw std::invalid_argument("unknown score window '" + std::string(name) +
                              "' (expected after-learning, from-start)");
}

std::size_t default_stride(std::size_t n) { return n <= 10'000 ? 1 : n / 1000; }

std::vector<std::size_t> emitted_indices(std::size_t learning, std::size_t n, std::size_t stride) {
  if (stride == 0) throw std::invalid_argument("stride must be at least 1");
  if (learning >= n) throw std::invalid_argument("learning length must be smaller than n");
  std::vector<std::size_t> ks;
  for (std::size_t k = learning + 1; k <= n; k += stride) ks.push_back(k);
  if (ks.back() != n) ks.push_back(n);
  return ks;
}

namespace {

// Prefix sums of ℓ̇ and of one Fisher summand at a fixed θ, for j = 1..upto.
// Stored flat: index 0 holds the empty sum.
class TransitionSums {
 public:
  TransitionSums(const Vector& theta, const Trajectory& traj, const ModelSpec& model,
                 FisherMethod method, std::size_t upto, bool with_fisher)
      : d_(model.dim()), score_((upto + 1) * d_, 0.0) {
    if (with_fisher) fisher_.assign((upto + 1) * d_ * d_, 0.0);
    const double ig = (with_fisher && method == FisherMethod::Factorized) ? i_g(model.noise) : 0.0;
    for (std::size_t j = 1; j <= upto; ++j) {
      const Vector s = ell_dot(theta, traj[j - 1], traj[j], model);
      for (std::size_t a = 0; a < d_; ++a) score_[j * d_ + a] = score_[(j - 1) * d_ + a] + s[a];
      if (!with_fisher) continue;
      const Matrix f = fisher_term(method, theta, traj[j - 1], traj[j], model, ig);
      const std::size_t dd = d_ * d_;
      for (std::size_t a = 0; a < d_; ++a)
        for (std::size_t b = 0; b < d_; ++b)
          fisher_[j * dd + a * d_ + b] = fisher_[(j - 1) * dd + a * d_ + b] + f(a, b);
    }
  }

  /// Σ_{j=from+1}^{to} ℓ̇.
  Vector score(std::size_t from, std::size_t to) const {
    Vector v(d_);
    for (std::size_t a = 0; a < d_; ++a) v[a] = score_[to * d_ + a] - score_[from * d_ + a];
    return v;
  }

  /// Σ_{j=1}^{to} Fisher summand.
  Matrix fisher(std::size_t to) const {
    Matrix m(d_, d_);
    for (std::size_t a = 0; a < d_; ++a)
      for (std::size_t b = 0; b < d_; ++b) m(a, b) = fisher_[to * d_ * d_ + a * d_ + b];
    return m;
  }

 private:
  std::size_t d_;
  std::vector<double> score_;
  std::vector<double> fisher_;
};

Matrix inverse_information(const TransitionSums& sums, std::size_t k, FisherMethod method) {
  return invert(make_fisher_matrix(sums.fisher(k) / static_cast<double>(k), method, k));
}

void check_inputs(const Trajectory& traj, const ModelSpec& model, const PreliminaryEstimate& prelim) {
  validate(traj);
  if (prelim.theta.size() != model.dim())
    throw std::invalid_argument("preliminary estimate has the wrong dimension");
  if (!model.domain.contains_interior(prelim.theta))
    throw std::invalid_argument("preliminary estimate must lie in the interior of the domain");
  if (prelim.learning_length < 1 || prelim.learning_length >= traj.n())
    throw std::invalid_argument("learning length must satisfy 1 <= N < n");
}

std::size_t effective_stride(const ProcessOptions& options, std::size_t n) {
  return options.stride == 0 ? default_stride(n) : options.stride;
}

// Shared body of the one-step and second-preliminary processes.
EstimatorPath corrected_path(const Trajectory& traj, const ModelSpec& model,
                             const PreliminaryEstimate& prelim, const ProcessOptions& options,
                             ScoreStart start, ProcessKind kind) {
  check_inputs(traj, model, prelim);
  const std::size_t n = traj.n();
  const std::size_t big_n = prelim.learning_length;
  const Vector& base = prelim.theta;
  const TransitionSums sums(base, traj, model, options.fisher, n, true);

  Matrix frozen_inverse;
  if (options.fisher_window == FisherWindow::Learning)
    frozen_inverse = inverse_information(sums, big_n, options.fisher);

  EstimatorPath path;
  path.kind = kind;
  path.learning_length = big_n;
  path.preliminary = prelim;
  const std::size_t from = start == ScoreStart::AfterLearning ? big_n : 0;
  for (const std::size_t k : emitted_indices(big_n, n, effective_stride(options, n))) {
    const Matrix inverse = options.fisher_window == FisherWindow::Learning
                               ? frozen_inverse
                               : inverse_information(sums, k, options.fisher);
    path.entries.push_back({k, base + inverse * sums.score(from, k) / static_cast<double>(k)});
  }
  return path;
}

}  // namespace

EstimatorPath one_step_path(const Trajectory& traj, const ModelSpec& model,
                            const PreliminaryEstimate& prelim, const ProcessOptions& options) {
  return corrected_path(traj, model, prelim, options, options.score_start, ProcessKind::OneStep);
}

EstimatorPath second_preliminary_path(const Trajectory& traj, const ModelSpec& model,
                                      const PreliminaryEstimate& prelim,
                                      const ProcessOptions& options) {
  return corrected_path(traj, model, prelim, options, ScoreStart::FromStart,
                        ProcessKind::SecondPreliminary);
}

EstimatorPath two_step_path(const Trajectory& traj, const ModelSpec& model,
                            const PreliminaryEstimate& prelim, const ProcessOptions& options) {
  const EstimatorPath first = second_preliminary_path(traj, model, prelim, options);
  const double ig = options.fisher == FisherMethod::Factorized ? i_g(model.noise) : 0.0;

  EstimatorPath path;
  path.kind = ProcessKind::TwoStep;
  path.learning_length = first.learning_length;
  path.preliminary = prelim;
  for (const PathEntry& e : first.entries) {
    Vector theta2 = e.theta;
    const Vector inside = model.domain.project(theta2);
    if ((inside.array() != theta2.array()).any()) {
      path.projected_at.push_back(e.k);
      theta2 = inside;
    }
    const auto d = model.dim();
    Vector score_sum = Vector::Zero(d);
    Matrix fisher_sum = Matrix::Zero(d, d);
    for (std::size_t j = 1; j <= e.k; ++j) {
      score_sum += ell_dot(theta2, traj[j - 1], traj[j], model);
      fisher_sum += fisher_term(options.fisher, theta2, traj[j - 1], traj[j], model, ig);
    }
    const double k = static_cast<double>(e.k);
    const Matrix inverse = invert(make_fisher_matrix(fisher_sum / k, options.fisher, e.k));
    path.entries.push_back({e.k, theta2 + inverse * score_sum / k});
  }
  return path;
}

EstimatorPath recurrent_path(const Trajectory& traj, const ModelSpec& model,
                             const PreliminaryEstimate& prelim, const ProcessOptions& options,
                             bool windowed) {
  if (options.fisher_window != FisherWindow::Learning)
    throw std::invalid_argument("recurrent_path: the online form needs the learning-window Fisher");
  check_inputs(traj, model, prelim);
  const std::size_t n = traj.n();
  const std::size_t big_n = prelim.learning_length;
  const Vector& base = prelim.theta;
  const Matrix inverse =
      invert(estimate_fisher(options.fisher, base, traj, ScoreWindow{1, big_n}, model));

  const std::vector<std::size_t> ks = emitted_indices(big_n, n, effective_stride(options, n));
  auto next_emit = ks.begin();

  EstimatorPath path;
  path.kind = ProcessKind::Recurrent;
  path.learning_length = big_n;
  path.preliminary = prelim;

  // theta holds θ_k; the empty sum gives θ_k = θ̄_N at the starting index.
  Vector theta = base;
  for (std::size_t k = windowed ? big_n : 0; k < n; ++k) {
    const double kk = static_cast<double>(k);
    const Vector step = inverse * ell_dot(base, traj[k], traj[k + 1], model);
    theta = (kk * theta + base + step) / (kk + 1.0);
    if (next_emit != ks.end() && *next_emit == k + 1) {
      path.entries.push_back({k + 1, theta});
      ++next_emit;
    }
  }
  return path;
}

EstimatorPath full_mle_path(const Trajectory& traj, const ModelSpec& model,
                            std::size_t grid_points, const std::vector<std::size_t>& checkpoints) {
  validate(traj);
  if (checkpoints.empty()) throw std::invalid_argument("full_mle_path: no checkpoints");
  if (!std::is_sorted(checkpoints.begin(), checkpoints.end()) ||
      std::adjacent_find(checkpoints.begin(), checkpoints.end()) != checkpoints.end())
    throw std::invalid_argument("full_mle_path: checkpoints must be strictly increasing");
  EstimatorPath path;
  path.kind = ProcessKind::FullMle;
  for (const std::size_t k : checkpoints) path.entries.push_back({k, mle(traj, k, model, grid_points).theta});
  return path;
}

EstimatorPath estimator_path(ProcessKind kind, const Trajectory& traj, const ModelSpec& model,
                             const PreliminaryEstimate& prelim, const ProcessOptions& options,
                             std::size_t grid_points) {
  switch (kind) {
    case ProcessKind::OneStep: return one_step_path(traj, model, prelim, options);
    case ProcessKind::SecondPreliminary: return second_preliminary_path(traj, model, prelim, options);
    case ProcessKind::TwoStep: return two_step_path(traj, model, prelim, options);
    case ProcessKind::Recurrent: return recurrent_path(traj, model, prelim, options);
    case ProcessKind::FullMle: {
      validate(traj);
      const std::size_t stride = options.stride == 0 ? default_stride(traj.n()) : options.stride;
      EstimatorPath path = full_mle_path(
          traj, model, grid_points, emitted_indices(prelim.learning_length, traj.n(), stride));
      path.learning_length = prelim.learning_length;
      path.preliminary = prelim;
      return path;
    }
  }
  throw std::logic_error("estimator_path: unreachable");
}

namespace {

nlohmann::json theta_json(const Vector& v) { return std::vector<double>(v.begin(), v.end()); }

}  // namespace

void write_csv(std::ostream& os, const EstimatorPath& path, std::size_t n,
               const nlohmann::json& config) {
  os << "# config: " << config.dump() << '\n';
  os << "k,s";
  const Eigen::Index d = path.entries.empty() ? 0 : path.entries.front().theta.size();
  for (Eigen::Index i = 1; i <= d; ++i) os << ",theta_" << i;
  os << ",kind\n" << std::setprecision(17);
  for (const PathEntry& e : path.entries) {
    os << e.k << ',' << static_cast<double>(e.k) / static_cast<double>(n);
    for (Eigen::Index i = 0; i < d; ++i) os << ',' << e.theta[i];
    os << ',' << to_string(path.kind) << '\n';
  }
}

nlohmann::json to_json(const EstimatorPath& path, std::size_t n, const nlohmann::json& config) {
  nlohmann::json entries = nlohmann::json::array();
  for (const PathEntry& e : path.entries)
    entries.push_back({{"k", e.k},
                       {"s", static_cast<double>(e.k) / static_cast<double>(n)},
                       {"theta", theta_json(e.theta)}});
  nlohmann::json j{{"kind", to_string(path.kind)},
                   {"learning_length", path.learning_length},
                   {"n", n},
                   {"projected_at", path.projected_at},
                   {"entries", std::move(entries)},
                   {"config", config}};
  if (path.preliminary) j["preliminary"] = to_json(*path.preliminary);
  return j;
}

}  // namespace mlep
