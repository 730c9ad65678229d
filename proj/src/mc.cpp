#include "mlep/mc.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <iomanip>
#include <map>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <thread>
#include <tuple>

#include <boost/math/distributions/normal.hpp>

#include "mlep/error.hpp"
#include "mlep/fisher.hpp"
#include "mlep/simulate.hpp"

namespace mlep {

namespace {

constexpr std::array<double, 5> kQuantileLevels{0.05, 0.25, 0.50, 0.75, 0.95};

std::vector<double> to_std(const Vector& v) { return {v.begin(), v.end()}; }

Vector to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

nlohmann::json matrix_json(const Matrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    std::vector<double> row(static_cast<std::size_t>(m.cols()));
    for (Eigen::Index c = 0; c < m.cols(); ++c) row[static_cast<std::size_t>(c)] = m(r, c);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

std::string Pipeline::label() const {
  std::string s(to_string(preliminary));
  if (!process) return s + "-only";
  s += "+";
  s += to_string(*process);
  return s;
}

void validate(const McConfig& cfg, const ModelSpec& model) {
  if (cfg.replications < 2) throw std::invalid_argument("McConfig: need at least 2 replications");
  if (!model.domain.contains_interior(cfg.theta0))
    throw std::invalid_argument("McConfig: theta0 must lie in the interior of the domain");
  if (cfg.n < 3) throw std::invalid_argument("McConfig: n must be at least 3");
  if (!(cfg.delta > 0.0 && cfg.delta < 1.0)) throw std::invalid_argument("McConfig: need 0 < delta < 1");
}

Matrix oracle_information(const ModelSpec& model, const Vector& theta0, std::size_t n_oracle,
                          std::uint64_t seed, std::size_t burn_in) {
  using Key = std::tuple<std::string, std::vector<double>, std::size_t, std::uint64_t, std::size_t>;
  static std::mutex mutex;
  static std::map<Key, Matrix> cache;
  const Key key{model.name, to_std(theta0), n_oracle, seed, burn_in};
  {
    const std::lock_guard lock(mutex);
    if (const auto it = cache.find(key); it != cache.end()) return it->second;
  }
  const Trajectory traj = simulate(model, theta0, n_oracle, seed, {burn_in, 0.0});
  Matrix info = plugin_fisher(theta0, traj, ScoreWindow{1, traj.n()}, model).matrix;
  const std::lock_guard lock(mutex);
  cache.emplace(key, info);
  return info;
}

Vector run_replication(const McConfig& cfg, const ModelSpec& model, std::uint64_t seed) {
  const Trajectory traj = simulate(model, cfg.theta0, cfg.n, seed, {cfg.burn_in, cfg.x_init});
  const std::size_t big_n = learning_length(cfg.n, cfg.delta);
  const Pipeline& p = cfg.pipeline;

  const PreliminaryEstimate prelim =
      preliminary_estimate(p.preliminary, traj, big_n, model, p.grid_points);
  if (!p.process) return prelim.theta;

  ProcessOptions options = p.options;
  if (options.stride == 0) options.stride = cfg.n;  // terminal value only
  return estimator_path(*p.process, traj, model, prelim, options, p.grid_points).terminal();
}

double empirical_quantile(std::vector<double> values, double level) {
  if (values.empty()) throw std::invalid_argument("empirical_quantile: no values");
  std::sort(values.begin(), values.end());
  const double pos = level * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

McReport run_study(const McConfig& cfg, const ModelSpec& model) {
  validate(cfg, model);
  const std::size_t m = cfg.replications;
  std::vector<std::optional<Vector>> results(m);
  std::vector<std::string> errors(m);

  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < m; i = next++) {
      try {
        results[i] = run_replication(cfg, model, cfg.base_seed + i);
      } catch (const Error& e) {
        errors[i] = e.what();
      }
    }
  };
  std::size_t workers = cfg.workers == 0 ? std::thread::hardware_concurrency() : cfg.workers;
  workers = std::clamp<std::size_t>(workers, 1, m);
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }

  McReport report;
  report.config = cfg;
  report.learning_length = learning_length(cfg.n, cfg.delta);
  const auto d = model.dim();
  std::vector<Vector> rows;
  for (std::size_t i = 0; i < m; ++i) {
    if (results[i]) {
      rows.push_back(std::sqrt(static_cast<double>(cfg.n)) * (*results[i] - cfg.theta0));
      report.seeds.push_back(cfg.base_seed + i);
    } else {
      report.failures.push_back({i, cfg.base_seed + i, errors[i]});
    }
  }
  if (static_cast<double>(report.failures.size()) > kMaxFailureFraction * static_cast<double>(m))
    throw StudyError(std::to_string(report.failures.size()) + " of " + std::to_string(m) +
                     " replications failed; first error: " + report.failures.front().message);
  if (rows.size() < 2) throw StudyError("fewer than two successful replications");

  report.terminal_errors.resize(static_cast<Eigen::Index>(rows.size()), d);
  for (std::size_t r = 0; r < rows.size(); ++r)
    report.terminal_errors.row(static_cast<Eigen::Index>(r)) = rows[r].transpose();
  const Matrix centered = report.terminal_errors.rowwise() - report.terminal_errors.colwise().mean();
  report.empirical_covariance =
      centered.transpose() * centered / static_cast<double>(rows.size() - 1);

  try {
    const Matrix info = oracle_information(model, cfg.theta0, cfg.oracle_n, cfg.oracle_seed, cfg.burn_in);
    report.reference_information = info;
    report.reference_information_inverse = invert(FisherMatrix{info, FisherMethod::PlugIn, cfg.oracle_n});
  } catch (const Error& e) {
    report.reference_note = std::string("reference information unavailable: ") + e.what();
  }

  const boost::math::normal standard;
  for (Eigen::Index c = 0; c < d; ++c) {
    std::vector<double> column(report.terminal_errors.col(c).begin(), report.terminal_errors.col(c).end());
    std::vector<QuantileRow> table;
    for (const double level : kQuantileLevels) {
      QuantileRow q{level, empirical_quantile(column, level), std::nullopt};
      if (report.reference_information_inverse)
        q.gaussian = std::sqrt((*report.reference_information_inverse)(c, c)) *
                     boost::math::quantile(standard, level);
      table.push_back(q);
    }
    report.quantiles.push_back(std::move(table));
  }
  return report;
}

McReport run_study(const McConfig& cfg) { return run_study(cfg, model_by_name(cfg.model_name)); }

ComparisonTable summarize(const std::vector<McReport>& reports) {
  ComparisonTable table;
  for (const McReport& r : reports) {
    ComparisonRow row;
    row.label = r.config.pipeline.label();
    row.learning_length = r.learning_length;
    row.variance = r.empirical_covariance.diagonal();
    row.rate_adjusted_variance =
        row.variance * static_cast<double>(r.learning_length) / static_cast<double>(r.config.n);
    row.quantiles = r.quantiles;
    row.failures = r.failures.size();
    table.rows.push_back(std::move(row));
    if (!table.reference_information_inverse) table.reference_information_inverse = r.reference_information_inverse;
  }
  return table;
}

ComparisonTable compare_estimators(const std::vector<McConfig>& cfgs, const ModelSpec& model) {
  if (cfgs.empty()) throw std::invalid_argument("compare_estimators: no configurations");
  const McConfig& first = cfgs.front();
  for (const McConfig& c : cfgs) {
    const bool same = c.model_name == first.model_name && c.theta0.size() == first.theta0.size() &&
                      c.theta0 == first.theta0 && c.n == first.n &&
                      c.replications == first.replications && c.base_seed == first.base_seed;
    if (!same)
      throw std::invalid_argument(
          "compare_estimators: configurations must share model, theta0, n, replications and base_seed");
  }
  std::vector<McReport> reports;
  for (const McConfig& c : cfgs) reports.push_back(run_study(c, model));
  return summarize(reports);
}

ComparisonTable compare_estimators(const std::vector<McConfig>& cfgs) {
  if (cfgs.empty()) throw std::invalid_argument("compare_estimators: no configurations");
  return compare_estimators(cfgs, model_by_name(cfgs.front().model_name));
}

nlohmann::json to_json(const Pipeline& p) {
  return {{"preliminary", to_string(p.preliminary)},
          {"process", p.process ? nlohmann::json(to_string(*p.process)) : nlohmann::json("none")},
          {"fisher", to_string(p.options.fisher)},
          {"fisher_window", to_string(p.options.fisher_window)},
          {"score_window", to_string(p.options.score_start)},
          {"grid_points", p.grid_points}};
}

Pipeline pipeline_from_json(const nlohmann::json& p) {
  Pipeline out;
  out.preliminary = preliminary_kind_from_string(p.value("preliminary", std::string("emm")));
  const std::string process = p.value("process", std::string("one-step"));
  out.process = process == "none" ? std::nullopt : std::optional(process_kind_from_string(process));
  out.options.fisher = fisher_method_from_string(p.value("fisher", std::string("observed")));
  out.options.fisher_window = fisher_window_from_string(p.value("fisher_window", std::string("learning")));
  out.options.score_start = score_start_from_string(p.value("score_window", std::string("after-learning")));
  out.grid_points = p.value("grid_points", out.grid_points);
  return out;
}

nlohmann::json to_json(const McConfig& cfg) {
  return {{"model", cfg.model_name},
          {"theta0", to_std(cfg.theta0)},
          {"n", cfg.n},
          {"delta", cfg.delta},
          {"pipeline", to_json(cfg.pipeline)},
          {"replications", cfg.replications},
          {"base_seed", cfg.base_seed},
          {"stride", cfg.pipeline.options.stride},
          {"burn_in", cfg.burn_in},
          {"x_init", cfg.x_init},
          {"oracle_n", cfg.oracle_n},
          {"oracle_seed", cfg.oracle_seed},
          {"workers", cfg.workers}};
}

McConfig mc_config_from_json(const nlohmann::json& j) {
  McConfig cfg;
  cfg.model_name = j.value("model", cfg.model_name);
  if (j.contains("theta0")) {
    const auto& t = j.at("theta0");
    cfg.theta0 = t.is_array() ? to_vector(t.get<std::vector<double>>()) : scalar(t.get<double>());
  }
  cfg.n = j.value("n", cfg.n);
  cfg.delta = j.value("delta", cfg.delta);
  cfg.replications = j.value("replications", cfg.replications);
  cfg.base_seed = j.value("base_seed", cfg.base_seed);
  cfg.burn_in = j.value("burn_in", cfg.burn_in);
  cfg.x_init = j.value("x_init", cfg.x_init);
  cfg.oracle_n = j.value("oracle_n", cfg.oracle_n);
  cfg.oracle_seed = j.value("oracle_seed", cfg.oracle_seed);
  cfg.workers = j.value("workers", cfg.workers);
  cfg.pipeline.options.stride = j.value("stride", std::size_t{0});
  if (j.contains("pipeline")) {
    const std::size_t stride = cfg.pipeline.options.stride;
    cfg.pipeline = pipeline_from_json(j.at("pipeline"));
    cfg.pipeline.options.stride = stride;
  }
  return cfg;
}

namespace {

nlohmann::json quantiles_json(const std::vector<std::vector<QuantileRow>>& q) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& coord : q) {
    nlohmann::json rows = nlohmann::json::array();
    for (const QuantileRow& r : coord)
      rows.push_back({{"level", r.level},
                      {"empirical", r.empirical},
                      {"gaussian", r.gaussian ? nlohmann::json(*r.gaussian) : nlohmann::json(nullptr)}});
    out.push_back(rows);
  }
  return out;
}

}  // namespace

nlohmann::json to_json(const McReport& report) {
  nlohmann::json failures = nlohmann::json::array();
  for (const auto& f : report.failures)
    failures.push_back({{"replication", f.replication}, {"seed", f.seed}, {"message", f.message}});
  const auto optional_matrix = [](const std::optional<Matrix>& m) {
    return m ? matrix_json(*m) : nlohmann::json(nullptr);
  };
  return {{"config", to_json(report.config)},
          {"learning_length", report.learning_length},
          {"terminal_errors", matrix_json(report.terminal_errors)},
          {"seeds", report.seeds},
          {"failures", failures},
          {"empirical_covariance", matrix_json(report.empirical_covariance)},
          {"reference_information", optional_matrix(report.reference_information)},
          {"reference_information_inverse", optional_matrix(report.reference_information_inverse)},
          {"reference_note", report.reference_note},
          {"quantiles", quantiles_json(report.quantiles)}};
}

nlohmann::json to_json(const ComparisonTable& table) {
  nlohmann::json rows = nlohmann::json::array();
  for (const ComparisonRow& r : table.rows)
    rows.push_back({{"label", r.label},
                    {"learning_length", r.learning_length},
                    {"variance", to_std(r.variance)},
                    {"rate_adjusted_variance", to_std(r.rate_adjusted_variance)},
                    {"quantiles", quantiles_json(r.quantiles)},
                    {"failures", r.failures}});
  return {{"rows", rows},
          {"reference_information_inverse", table.reference_information_inverse
                                                ? matrix_json(*table.reference_information_inverse)
                                                : nlohmann::json(nullptr)}};
}

void write_csv(std::ostream& os, const McReport& report) {
  os << "# config: " << to_json(report.config).dump() << '\n';
  os << "replication,seed";
  for (Eigen::Index c = 1; c <= report.terminal_errors.cols(); ++c) os << ",error_" << c;
  os << '\n' << std::setprecision(17);
  for (Eigen::Index r = 0; r < report.terminal_errors.rows(); ++r) {
    const std::uint64_t seed = report.seeds[static_cast<std::size_t>(r)];
    os << (seed - report.config.base_seed) << ',' << seed;
    for (Eigen::Index c = 0; c < report.terminal_errors.cols(); ++c) os << ',' << report.terminal_errors(r, c);
    os << '\n';
  }
}

}  // namespace mlep
