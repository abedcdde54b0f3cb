#include <stdexcept>
#include <cmath>

#include "doctest.h"
#include "gmf/paths.hpp"
#include "test_support.hpp"

using namespace gmf;

TEST_CASE("time grid layout") {
  TimeGrid g = TimeGrid::create(1e-3, 0.05, 1.0);
  CHECK(g.steps == 1000);
  CHECK(g.steps_per_correction == 50);
  CHECK(g.corrections == 20);
  CHECK(g.time_at(50) == doctest::Approx(0.05));
  CHECK(!g.is_correction_step(0));
  CHECK(!g.is_correction_step(49));
  CHECK(g.is_correction_step(50));
  CHECK(g.is_correction_step(1000));
}

TEST_CASE("time grid rejects incompatible spacings") {
  CHECK_THROWS_AS(TimeGrid::create(0.012, 0.05, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(TimeGrid::create(1e-3, 0.05, 0.97), std::invalid_argument);
  // dt > delta/10
  CHECK_THROWS_AS(TimeGrid::create(0.01, 0.05, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(TimeGrid::create(-1e-3, 0.05, 1.0), std::invalid_argument);
}

TEST_CASE("signal paths reproduce the OU mean and variance") {
  // X0 = 2 fixed, theta = sigma = 1: E X_1 = 2/e, Var X_1 = (1 - e^-2)/2
  Model m = make_linear_model(1.0, 1.0, 1.0, 2.0, 0.0);
  TimeGrid g = TimeGrid::create(1e-3, 0.05, 1.0);
  const int paths = 2000;
  double sum = 0.0, sumsq = 0.0;
  for (int p = 0; p < paths; ++p) {
    RngStream rng(99, static_cast<std::uint64_t>(p));
    SignalPath s = simulate_signal(m, g, rng);
    CHECK(s.values[0] == 2.0);
    sum += s.values.back();
    sumsq += s.values.back() * s.values.back();
  }
  const double mean = sum / paths;
  const double var = sumsq / paths - mean * mean;
  const double exact_mean = 2.0 * std::exp(-1.0);
  const double exact_var = 0.5 * (1.0 - std::exp(-2.0));
  const double se = std::sqrt(exact_var / paths);
  CHECK(std::abs(mean - exact_mean) < 5.0 * se);
  CHECK(std::abs(var - exact_var) < 0.2 * exact_var);
}

TEST_CASE("observation increments without noise are exactly h dt") {
  Model m = make_builtin_model("bounded_sine");
  TimeGrid g = TimeGrid::create(5e-3, 0.05, 0.25);
  RngStream sig_rng(7, kSignalStream), obs_rng(7, kObservationStream);
  SignalPath s = simulate_signal(m, g, sig_rng);
  ObservationPath obs = simulate_observation(m, s, obs_rng, 0.0);
  for (long k = 0; k < g.steps; ++k)
    CHECK(obs.increments[static_cast<std::size_t>(k)] ==
          m.sensor(s.values[static_cast<std::size_t>(k)]) * g.dt);
  CHECK(obs.cumulative[0] == 0.0);
}

TEST_CASE("pure-noise increments have Brownian statistics") {
  TimeGrid g = TimeGrid::create(1e-3, 0.05, 1.0);
  double sum = 0.0, sumsq = 0.0;
  long count = 0;
  for (int p = 0; p < 10; ++p) {
    RngStream rng(123, static_cast<std::uint64_t>(p));
    ObservationPath obs = reference_observation(g, rng);
    for (double dy : obs.increments) {
      sum += dy;
      sumsq += dy * dy;
      ++count;
    }
  }
  const double mean = sum / static_cast<double>(count);
  const double var = sumsq / static_cast<double>(count) - mean * mean;
  CHECK(std::abs(mean) < 5.0 * std::sqrt(g.dt / static_cast<double>(count)));
  CHECK(var == doctest::Approx(g.dt).epsilon(0.10));
}

TEST_CASE("coarsening preserves the Brownian path") {
  TimeGrid fine = TimeGrid::create(1e-4, 0.1, 1.0);
  RngStream rng(5, 0);
  ObservationPath obs = reference_observation(fine, rng);
  ObservationPath c10 = coarsen_observation(obs, 10);
  CHECK(c10.grid.dt == doctest::Approx(1e-3));
  CHECK(c10.grid.steps == 1000);
  CHECK(c10.cumulative.back() ==
        doctest::Approx(obs.cumulative.back()).epsilon(1e-12));
  // increment 0 of the coarse path aggregates the first 10 fine increments
  double sum = 0.0;
  for (int j = 0; j < 10; ++j) sum += obs.increments[static_cast<std::size_t>(j)];
  CHECK(c10.increments[0] == doctest::Approx(sum).epsilon(1e-15));
  CHECK_THROWS_AS(coarsen_observation(obs, 7), std::invalid_argument);
}

TEST_CASE("observation CSV round-trips bit for bit") {
  Model m = make_builtin_model("linear_ou");
  TimeGrid g = TimeGrid::create(5e-3, 0.05, 0.25);
  RngStream sig_rng(11, kSignalStream), obs_rng(11, kObservationStream);
  SignalPath s = simulate_signal(m, g, sig_rng);
  ObservationPath obs = simulate_observation(m, s, obs_rng);
  const std::string dir = testsup::scratch_dir("paths_csv");
  const std::string file = dir + "/obs.csv";
  write_observation_csv(file, obs);
  ObservationPath back = read_observation_csv(file, 0.05);
  REQUIRE(back.grid == obs.grid);
  REQUIRE(back.increments.size() == obs.increments.size());
  for (std::size_t k = 0; k < obs.increments.size(); ++k)
    CHECK(back.increments[k] == obs.increments[k]);
  CHECK(observation_content_hash(back) == observation_content_hash(obs));
}

TEST_CASE("content hash reacts to any increment change") {
  TimeGrid g = TimeGrid::create(5e-3, 0.05, 0.25);
  RngStream rng(13, 0);
  ObservationPath obs = reference_observation(g, rng);
  const std::uint64_t h0 = observation_content_hash(obs);
  obs.increments[17] += 1e-12;
  CHECK(observation_content_hash(obs) != h0);
}
