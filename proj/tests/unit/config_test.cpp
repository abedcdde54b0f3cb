#include <fstream>
#include <stdexcept>
#include <string>

#include "doctest.h"
#include "gmf/config.hpp"
#include "test_support.hpp"

using namespace gmf;
using doctest::Contains;

TEST_CASE("empty config resolves to the documented defaults") {
  StudyConfig cfg = parse_config("{}");
  CHECK(cfg.model == "linear_ou");
  CHECK(cfg.phi == "x");
  CHECK(cfg.epsilon == 0.5);
  CHECK(cfg.beta == 1.0);
  CHECK(cfg.n_grid == std::vector<int>{50, 100, 200, 400, 800});
  CHECK(cfg.replicas == 200);
  CHECK(cfg.dt == 1e-3);
  CHECK(cfg.delta == 0.05);
  CHECK(cfg.horizon == 1.0);
  CHECK(cfg.master_seed == 20240817);
  CHECK(!cfg.master_seed_explicit);
  CHECK(!cfg.n.has_value());
  CHECK(cfg.single_filter_n() == 50);
  CHECK_NOTHROW(validate_study(cfg));
}

TEST_CASE("every key parses from JSON") {
  const char* text = R"({
    "model": "bounded_sine", "phi": "sin", "epsilon": 0.25, "beta": 2.0,
    "n_grid": [10, 20, 40, 80], "replicas": 60, "dt": 0.005, "delta": 0.05,
    "T": 0.25, "master_seed": 99, "output_dir": "elsewhere", "n": 123,
    "slope_min": -1.5, "slope_max": -0.1, "oracle_particles": 5000,
    "oracle_batches": 4, "observation_seed": 17
  })";
  StudyConfig cfg = parse_config(text);
  CHECK(cfg.model == "bounded_sine");
  CHECK(cfg.phi == "sin");
  CHECK(cfg.epsilon == 0.25);
  CHECK(cfg.beta == 2.0);
  CHECK(cfg.n_grid == std::vector<int>{10, 20, 40, 80});
  CHECK(cfg.replicas == 60);
  CHECK(cfg.horizon == 0.25);
  CHECK(cfg.master_seed == 99);
  CHECK(cfg.master_seed_explicit);
  CHECK(cfg.output_dir == "elsewhere");
  CHECK(cfg.single_filter_n() == 123);
  CHECK(cfg.slope_min == -1.5);
  CHECK(cfg.slope_max == -0.1);
  CHECK(cfg.oracle_particles == 5000);
  CHECK(cfg.oracle_batches == 4);
  REQUIRE(cfg.observation_seed.has_value());
  CHECK(*cfg.observation_seed == 17);
}

TEST_CASE("seeds may be quoted to dodge JSON integer limits") {
  StudyConfig cfg = parse_config(R"({"master_seed": "18446744073709551615"})");
  CHECK(cfg.master_seed == 18446744073709551615ULL);
  CHECK(cfg.master_seed_explicit);
}

TEST_CASE("unknown keys are rejected by name") {
  CHECK_THROWS_WITH_AS(parse_config(R"({"partcles": 100})"),
                       "unknown config key: partcles", std::invalid_argument);
  CHECK_THROWS_WITH(parse_config(R"({"epsilon": "half"})"),
                    Contains("epsilon"));
  CHECK_THROWS_WITH(parse_config(R"({"n_grid": "many"})"), Contains("n_grid"));
}

TEST_CASE("overrides rewrite individual keys") {
  StudyConfig cfg = parse_config("{}");
  apply_override(cfg, "epsilon=0.75");
  apply_override(cfg, "model=bounded_sine");
  apply_override(cfg, "n_grid=8,16,32,64");
  apply_override(cfg, "T=0.5");
  apply_override(cfg, "master_seed=4242");
  CHECK(cfg.epsilon == 0.75);
  CHECK(cfg.model == "bounded_sine");
  CHECK(cfg.n_grid == std::vector<int>{8, 16, 32, 64});
  CHECK(cfg.horizon == 0.5);
  CHECK(cfg.master_seed == 4242);
  CHECK(cfg.master_seed_explicit);
  CHECK_THROWS_WITH(apply_override(cfg, "epsilon"), Contains("key=value"));
  CHECK_THROWS_WITH(apply_override(cfg, "wat=1"), Contains("wat"));
}

TEST_CASE("study invariants are enforced with named errors") {
  StudyConfig cfg = parse_config("{}");
  cfg.n_grid = {50};
  CHECK_THROWS_WITH(validate_study(cfg), Contains("n_grid"));
  cfg.n_grid = {50, 100, 100, 200};
  CHECK_THROWS_WITH(validate_study(cfg), Contains("n_grid"));
  cfg.n_grid = {1, 2, 4, 8};
  CHECK_THROWS_WITH(validate_study(cfg), Contains("n_grid"));
  cfg = parse_config("{}");
  cfg.replicas = 10;
  CHECK_THROWS_WITH(validate_study(cfg), Contains("replicas"));
}

TEST_CASE("grid construction flows through the config") {
  StudyConfig cfg = parse_config(R"({"dt": 0.005, "delta": 0.05, "T": 0.25})");
  TimeGrid g = study_grid(cfg);
  CHECK(g.steps == 50);
  CHECK(g.steps_per_correction == 10);
  CHECK(g.corrections == 5);
}

TEST_CASE("missing config files name the path") {
  CHECK_THROWS_WITH(load_config_file("/nonexistent/gmf.json"),
                    Contains("/nonexistent/gmf.json"));
  auto dir = testsup::scratch_dir("config_load");
  auto path = dir / "study.json";
  std::ofstream(path) << R"({"epsilon": 0.25, "replicas": 77})";
  StudyConfig cfg = load_config_file(path.string());
  CHECK(cfg.epsilon == 0.25);
  CHECK(cfg.replicas == 77);
}

TEST_CASE("resolved dumps reparse to the same configuration") {
  StudyConfig cfg = parse_config(
      R"({"epsilon": 0.25, "n_grid": [10, 20, 40, 80], "master_seed": 5})");
  const std::string dump = config_to_json(cfg);
  StudyConfig back = parse_config(dump);
  CHECK(back.epsilon == cfg.epsilon);
  CHECK(back.n_grid == cfg.n_grid);
  CHECK(back.master_seed == cfg.master_seed);
  CHECK(config_to_json(back) == dump);  // dump is a fixed point
}
