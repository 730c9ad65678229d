#include <cmath>
#include <sstream>

#include "doctest.h"
#include "mlep/error.hpp"
#include "mlep/mc.hpp"
#include "support/fixtures.hpp"

using namespace mlep;

namespace {

McConfig small_config() {
  McConfig cfg;
  cfg.model_name = "example2";
  cfg.theta0 = scalar(0.5);
  cfg.n = 2000;
  cfg.delta = 0.75;
  cfg.replications = 40;
  cfg.base_seed = 100;
  cfg.oracle_n = 200000;
  cfg.workers = 1;
  cfg.pipeline.preliminary = PreliminaryKind::Emm;
  cfg.pipeline.process = ProcessKind::OneStep;
  return cfg;
}

}  // namespace

TEST_CASE("noiseless study has zero errors") {
  const ModelSpec m = mlep::testing::noiseless_linear_model();
  McConfig cfg;
  cfg.model_name = m.name;
  cfg.theta0 = scalar(0.5);
  cfg.n = 60;
  cfg.delta = 0.5;
  cfg.replications = 2;
  cfg.burn_in = 0;
  cfg.x_init = 5.0;
  cfg.oracle_n = 1000;
  cfg.pipeline.preliminary = PreliminaryKind::Mle;
  cfg.pipeline.process = ProcessKind::OneStep;
  const McReport r = run_study(cfg, m);
  CHECK(r.failures.empty());
  CHECK(r.terminal_errors.rows() == 2);
  CHECK(r.terminal_errors.cwiseAbs().maxCoeff() < 1e-5);
  CHECK(r.empirical_covariance.cwiseAbs().maxCoeff() < 1e-10);
  // Zero noise carries no plug-in information at θ₀.
  CHECK_FALSE(r.reference_information_inverse.has_value());
  CHECK_FALSE(r.reference_note.empty());
}

TEST_CASE("study report structure") {
  const McReport r = run_study(small_config());
  CHECK(r.learning_length == learning_length(2000, 0.75));
  CHECK(r.terminal_errors.rows() + static_cast<Eigen::Index>(r.failures.size()) == 40);
  CHECK(r.seeds.front() == 100);
  REQUIRE(r.reference_information_inverse.has_value());
  CHECK((*r.reference_information_inverse)(0, 0) * (*r.reference_information)(0, 0) == doctest::Approx(1.0));
  REQUIRE(r.quantiles.size() == 1);
  REQUIRE(r.quantiles[0].size() == 5);
  CHECK(r.quantiles[0][2].level == 0.5);
  CHECK(r.quantiles[0][0].gaussian.value() < 0.0);
  CHECK(r.quantiles[0][2].gaussian.value() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(r.empirical_covariance(0, 0) > 0.0);

  const nlohmann::json j = to_json(r);
  CHECK(j["config"]["n"] == 2000);
  CHECK(j["terminal_errors"].size() == static_cast<std::size_t>(r.terminal_errors.rows()));
  CHECK(j["quantiles"][0].size() == 5);
}

TEST_CASE("reports are deterministic and independent of worker count") {
  McConfig a = small_config();
  McConfig b = small_config();
  b.workers = 4;
  const McReport ra = run_study(a);
  const McReport rb = run_study(b);
  CHECK(ra.terminal_errors == rb.terminal_errors);
  CHECK(ra.seeds == rb.seeds);
  CHECK(run_study(a).empirical_covariance == ra.empirical_covariance);
}

TEST_CASE("replication i uses seed base_seed + i") {
  const McConfig cfg = small_config();
  const McReport r = run_study(cfg);
  const Vector third = run_replication(cfg, example2_model(), cfg.base_seed + 2);
  CHECK(r.terminal_errors(2, 0) == doctest::Approx(std::sqrt(2000.0) * (third[0] - 0.5)).epsilon(1e-14));
}

TEST_CASE("failed replications are recorded, too many abort the study") {
  const ModelSpec m = zero_drift_model();
  McConfig cfg;
  cfg.model_name = m.name;
  cfg.theta0 = scalar(0.0);
  cfg.n = 200;
  cfg.replications = 5;
  cfg.oracle_n = 1000;
  cfg.pipeline.preliminary = PreliminaryKind::Emm;
  CHECK_THROWS_AS(run_study(cfg, m), StudyError);
}

TEST_CASE("config validation and JSON round trip") {
  McConfig cfg = small_config();
  cfg.pipeline.process = std::nullopt;
  cfg.pipeline.options.fisher = FisherMethod::Factorized;
  cfg.pipeline.options.fisher_window = FisherWindow::Running;
  cfg.pipeline.options.score_start = ScoreStart::FromStart;
  const McConfig back = mc_config_from_json(nlohmann::json::parse(to_json(cfg).dump()));
  CHECK(back.model_name == cfg.model_name);
  CHECK(back.theta0 == cfg.theta0);
  CHECK(back.n == cfg.n);
  CHECK(back.delta == cfg.delta);
  CHECK_FALSE(back.pipeline.process.has_value());
  CHECK(back.pipeline.options.fisher == FisherMethod::Factorized);
  CHECK(back.pipeline.options.fisher_window == FisherWindow::Running);
  CHECK(back.pipeline.options.score_start == ScoreStart::FromStart);
  CHECK(back.replications == cfg.replications);
  CHECK(back.base_seed == cfg.base_seed);
  CHECK(mc_config_from_json({{"theta0", 0.25}}).theta0[0] == 0.25);

  McConfig bad = small_config();
  bad.replications = 1;
  CHECK_THROWS_AS(run_study(bad), std::invalid_argument);
  bad = small_config();
  bad.theta0 = scalar(1.5);
  CHECK_THROWS_AS(run_study(bad), std::invalid_argument);
}

TEST_CASE("compare_estimators") {
  McConfig emm_only = small_config();
  emm_only.pipeline.process = std::nullopt;
  McConfig one_step = small_config();
  // Score and Fisher over [1, k]: the frozen learning-window Fisher overshoots
  // on the occasional far-off EMM value at this n.
  one_step.pipeline.options.score_start = ScoreStart::FromStart;
  one_step.pipeline.options.fisher_window = FisherWindow::Running;

  const ComparisonTable single = compare_estimators({one_step});
  CHECK(single.rows.size() == 1);
  CHECK(single.rows[0].label == "emm+one-step");
  CHECK(single.rows[0].failures == 0);

  const ComparisonTable table = compare_estimators({emm_only, one_step});
  REQUIRE(table.rows.size() == 2);
  CHECK(table.rows[0].label == "emm-only");
  CHECK(table.rows[0].rate_adjusted_variance[0] ==
        doctest::Approx(table.rows[0].variance[0] * learning_length(2000, 0.75) / 2000.0));
  CHECK(table.rows[0].variance[0] > table.rows[1].variance[0]);
  CHECK(to_json(table)["rows"].size() == 2);

  McConfig other = small_config();
  other.n = 3000;
  CHECK_THROWS_AS(compare_estimators({one_step, other}), std::invalid_argument);
}

TEST_CASE("report CSV") {
  McConfig cfg = small_config();
  cfg.replications = 3;
  const McReport r = run_study(cfg);
  std::ostringstream os;
  write_csv(os, r);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line.rfind("# config: ", 0) == 0);
  std::getline(is, line);
  CHECK(line == "replication,seed,error_1");
  std::getline(is, line);
  CHECK(line.rfind("0,100,", 0) == 0);
}

TEST_CASE("empirical quantile interpolates") {
  CHECK(empirical_quantile({3, 1, 2}, 0.5) == 2.0);
  CHECK(empirical_quantile({0, 10}, 0.25) == 2.5);
  CHECK(empirical_quantile({4}, 0.95) == 4.0);
}
