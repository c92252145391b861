#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>

#include <varinf/errors.hpp>
#include <varinf/harness.hpp>
#include <varinf/io.hpp>

using namespace varinf;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.n_grid = {100, 200, 400};
  cfg.trials = 3;
  cfg.seed = 5;
  return cfg;
}

}  // namespace

TEST_CASE("loglog slope") {
  CHECK(loglog_slope({1, 2, 4, 8}, {1, 0.5, 0.25, 0.125}) == doctest::Approx(-1.0));
  CHECK(loglog_slope({10, 100}, {3, 30}) == doctest::Approx(1.0));
  CHECK_THROWS_AS(loglog_slope({1}, {1}), ArgumentError);
}

TEST_CASE("config validation") {
  ExperimentConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.n_grid = {200, 100};
  CHECK_THROWS_AS(cfg.validate(), ArgumentError);
  cfg = ExperimentConfig{};
  cfg.tau = 2.0;
  CHECK_THROWS_AS(cfg.validate(), ArgumentError);
  cfg = ExperimentConfig{};
  cfg.variant = "Q";
  CHECK_THROWS_AS(cfg.validate(), ArgumentError);
  CHECK_THROWS_AS(config_from_json(nlohmann::json{{"shape", "circle"}, {"colour", 3}}), ArgumentError);
}

TEST_CASE("config JSON round trip") {
  ExperimentConfig cfg = small_config();
  cfg.tau = 0.01;
  cfg.ball = Ball{Eigen::Vector2d(0.5, 0.0), 0.7};
  cfg.query = Eigen::Vector2d(0.0, 1.0);
  const ExperimentConfig back = config_from_json(nlohmann::json::parse(config_to_json(cfg).dump()));
  CHECK(config_to_json(back).dump() == config_to_json(cfg).dump());
}

TEST_CASE("rate experiment is deterministic and well formed") {
  const ExperimentConfig cfg = small_config();
  const RateResult a = run_rate_experiment(cfg), b = run_rate_experiment(cfg);
  REQUIRE(a.trials.size() == 9);
  for (std::size_t k = 0; k < a.trials.size(); ++k) {
    CHECK(a.trials[k].value == b.trials[k].value);
    CHECK(a.trials[k].value > 0.0);
  }
  CHECK(a.slope.has_value());
  CHECK(a.slope_half_width.has_value());
  CHECK(*a.slope == *b.slope);
  CHECK(a.points.size() == 3);
}

TEST_CASE("single grid point leaves the slope unset") {
  ExperimentConfig cfg = small_config();
  cfg.n_grid = {200};
  const RateResult r = run_measure_experiment(cfg);
  CHECK_FALSE(r.slope.has_value());
  CHECK(r.points.size() == 1);
  CHECK(r.points[0].mean > 0.0);
}

TEST_CASE("emitted files") {
  const ExperimentConfig cfg = small_config();
  const std::string dir = "harness_emit_test";
  const RateResult r = run_tangent_experiment(cfg);
  emit_results(r, dir);
  const CsvTable table = read_csv(dir + "/tangent_trials.csv");
  CHECK(table.rows.size() == cfg.n_grid.size() * cfg.trials);
  const auto summary = nlohmann::json::parse(read_text_file(dir + "/tangent_summary.json"));
  CHECK(summary.contains("slope"));
  CHECK(summary.contains("points"));
  const ExperimentConfig back = config_from_json(summary);
  CHECK(config_to_json(back).dump() == config_to_json(cfg).dump());
  std::filesystem::remove_all(dir);
}

TEST_CASE("fluctuation over a delta grid") {
  ExperimentConfig cfg = small_config();
  cfg.n_grid = {2000};
  cfg.delta_grid = {0.05, 0.1, 0.2, 0.4};
  cfg.trials = 60;
  const RateResult r = run_fluctuation_experiment(cfg);
  CHECK(r.slope_axis == "delta");
  REQUIRE(r.slope.has_value());
  // sd of theta scales like delta^{-1/2} in dimension one
  CHECK(*r.slope == doctest::Approx(-0.5).epsilon(0.4));
}

TEST_CASE("pointwise error rate with an empty singular set") {
  ExperimentConfig cfg;
  cfg.density = "tilt";
  cfg.n_grid = {250, 1000, 4000, 16000};
  cfg.trials = 200;
  const RateResult r = run_fluctuation_experiment(cfg);
  REQUIRE(r.extra_slope.has_value());
  CHECK(std::abs(*r.extra_slope + 1.0 / 3.0) <= 0.15);
}
