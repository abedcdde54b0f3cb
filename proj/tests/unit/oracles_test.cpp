#include <stdexcept>
#include <cmath>
#include <filesystem>
#include <vector>

#include "doctest.h"
#include "gmf/oracles.hpp"
#include "gmf/paths.hpp"
#include "test_support.hpp"

using namespace gmf;

namespace {

ObservationPath make_obs(const Model& m, const TimeGrid& g,
                         std::uint64_t seed) {
  RngStream sig(seed, kSignalStream), obsn(seed, kObservationStream);
  SignalPath sig_path = simulate_signal(m, g, sig);
  return simulate_observation(m, sig_path, obsn);
}

}  // namespace

TEST_CASE("conditional variance settles at the Riccati fixed point") {
  // theta = sigma0 = gamma = 1: 0 = -2P + 1 - P^2 has root sqrt(2) - 1
  Model m = make_linear_model(1.0, 1.0, 1.0, 0.0, 1.0);
  TimeGrid g = TimeGrid::create(1e-3, 0.05, 8.0);
  MomentPath path = kalman_bucy(m, make_obs(m, g, 7));
  const double p_star = 0.41421356237309504;
  CHECK(path.variance.back() == doctest::Approx(p_star).epsilon(1e-3));
  // starting above the fixed point, P decreases monotonically toward it
  for (std::size_t k = 1; k < path.variance.size(); ++k) {
    CHECK(path.variance[k] <= path.variance[k - 1] + 1e-15);
    CHECK(path.variance[k] >= p_star - 1e-6);
  }
}

TEST_CASE("silent sensor reduces to the deterministic mean flow") {
  // gamma = 0: no information, m_k = m_0 (1 - theta dt)^k and rho(1) = 1
  Model m = make_linear_model(1.0, 0.5, 0.0, 1.0, 0.0);
  TimeGrid g = TimeGrid::create(1e-3, 0.05, 1.0);
  MomentPath path = kalman_bucy(m, make_obs(m, g, 11));
  double expected = 1.0;
  for (long k = 0; k <= g.steps; ++k) {
    CHECK(path.mean[static_cast<std::size_t>(k)] ==
          doctest::Approx(expected).epsilon(1e-12));
    CHECK(path.log_rho1[static_cast<std::size_t>(k)] == 0.0);
    expected *= 1.0 - g.dt;
  }
  CHECK(path.mean.back() == doctest::Approx(std::exp(-1.0)).epsilon(1e-3));
}

TEST_CASE("moment path exposes consistent pi and rho functionals") {
  Model m = make_builtin_model("linear_ou");
  TimeGrid g = TimeGrid::create(1e-3, 0.05, 1.0);
  MomentPath path = kalman_bucy(m, make_obs(m, g, 13));
  TestFunction x = make_test_function("x");
  TestFunction x2 = make_test_function("x2");
  for (long k : {0L, 250L, 777L, g.steps}) {
    const auto i = static_cast<std::size_t>(k);
    CHECK(path.pi_at(k, x) == doctest::Approx(path.mean[i]).epsilon(1e-12));
    CHECK(path.pi_at(k, x2) ==
          doctest::Approx(path.mean[i] * path.mean[i] + path.variance[i])
              .epsilon(1e-12));
    CHECK(path.rho_at(k, x) ==
          doctest::Approx(std::exp(path.log_rho1[i]) * path.pi_at(k, x)));
  }
  std::vector<double> series = rho_series(path, x);
  REQUIRE(series.size() == path.mean.size());
  CHECK(series[500] == doctest::Approx(path.rho_at(500, x)));
  CHECK(rho_reference(m, make_obs(m, g, 13), x) == series);
}

TEST_CASE("closed-form oracle refuses nonlinear models") {
  Model m = make_builtin_model("bounded_sine");
  TimeGrid g = TimeGrid::create(5e-3, 0.05, 0.25);
  CHECK_THROWS_WITH_AS(kalman_bucy(m, make_obs(m, g, 17)),
                       "oracle requires linear model", std::invalid_argument);
}

TEST_CASE("bootstrap with a silent sensor keeps unit mass") {
  Model m = make_linear_model(1.0, 1.0, 0.0, 0.0, 1.0);
  TimeGrid g = TimeGrid::create(5e-3, 0.05, 0.25);
  std::vector<TestFunction> phis = {make_test_function("x")};
  OracleSeries s = bootstrap_oracle(m, make_obs(m, g, 19), 500, 19, phis, 4);
  for (double r : s.rho_one) CHECK(r == 1.0);
}

TEST_CASE("bootstrap estimates track the closed form within stated error") {
  Model m = make_builtin_model("linear_ou");
  TimeGrid g = TimeGrid::create(5e-3, 0.05, 0.25);
  ObservationPath obs = make_obs(m, g, 23);
  MomentPath exact = kalman_bucy(m, obs);
  std::vector<TestFunction> phis = {make_test_function("x"),
                                    make_test_function("x2")};
  OracleSeries s = bootstrap_oracle(m, obs, 20000, 23, phis, 10);
  REQUIRE(s.times.size() == static_cast<std::size_t>(g.corrections) + 1);
  CHECK(s.total_particles == 20000);
  CHECK(s.batches == 10);
  for (std::size_t f = 0; f < phis.size(); ++f) {
    for (std::size_t i = 1; i < s.times.size(); ++i) {
      const long k =
          static_cast<long>(i) * g.steps_per_correction;
      REQUIRE(std::isfinite(s.pi_se[f][i]));
      CHECK(std::abs(s.pi[f][i] - exact.pi_at(k, phis[f])) <=
            4.0 * s.pi_se[f][i] + 1e-12);
    }
  }
  for (std::size_t i = 1; i < s.times.size(); ++i) {
    const long k = static_cast<long>(i) * g.steps_per_correction;
    CHECK(std::abs(s.rho_one[i] -
                   std::exp(exact.log_rho1[static_cast<std::size_t>(k)])) <=
          4.0 * s.rho_one_se[i] + 1e-12);
  }
}

TEST_CASE("stated error shrinks like one over sqrt(N)") {
  Model m = make_builtin_model("linear_ou");
  TimeGrid g = TimeGrid::create(5e-3, 0.05, 0.25);
  ObservationPath obs = make_obs(m, g, 29);
  std::vector<TestFunction> phis = {make_test_function("x")};
  OracleSeries small = bootstrap_oracle(m, obs, 40000, 29, phis, 20);
  OracleSeries big = bootstrap_oracle(m, obs, 160000, 29, phis, 20);
  const double ratio = small.pi_se[0].back() / big.pi_se[0].back();
  CHECK(ratio >= 1.0);  // 4x particles must not raise the error estimate
  CHECK(ratio <= 4.0);  // ... and should roughly halve it
}

TEST_CASE("single-batch runs carry no error estimate") {
  Model m = make_builtin_model("linear_ou");
  TimeGrid g = TimeGrid::create(5e-3, 0.05, 0.25);
  std::vector<TestFunction> phis = {make_test_function("x")};
  OracleSeries s = bootstrap_oracle(m, make_obs(m, g, 31), 1000, 31, phis, 1);
  for (double se : s.pi_se[0]) CHECK(std::isnan(se));
  CHECK(std::isnan(s.rho_one_se.back()));
}

TEST_CASE("oracle cache round-trips and refreshes on new functionals") {
  Model m = make_builtin_model("linear_ou");
  TimeGrid g = TimeGrid::create(5e-3, 0.05, 0.25);
  ObservationPath obs = make_obs(m, g, 37);
  std::vector<TestFunction> one_phi = {make_test_function("x")};
  std::vector<TestFunction> two_phi = {make_test_function("x"),
                                       make_test_function("x2")};
  const std::string dir = testsup::scratch_dir("oracle_cache").string();

  OracleSeries fresh =
      bootstrap_oracle_cached(m, obs, 2000, 37, one_phi, 5, 1, dir);
  const std::string file =
      (std::filesystem::path(dir) /
       (oracle_cache_key(m.name(), observation_content_hash(obs), 2000, 5,
                         37) +
        ".csv"))
          .string();
  CHECK(std::filesystem::exists(file));

  OracleSeries reloaded =
      bootstrap_oracle_cached(m, obs, 2000, 37, one_phi, 5, 1, dir);
  CHECK(reloaded.times == fresh.times);
  CHECK(reloaded.pi[static_cast<std::size_t>(reloaded.phi_index("x"))] ==
        fresh.pi[static_cast<std::size_t>(fresh.phi_index("x"))]);
  CHECK(reloaded.rho_one == fresh.rho_one);

  // asking for a functional the cache lacks forces a recompute that still
  // reproduces the old columns (same seed, same draws)
  OracleSeries wider =
      bootstrap_oracle_cached(m, obs, 2000, 37, two_phi, 5, 1, dir);
  CHECK(wider.phi_index("x2") >= 0);
  CHECK(wider.pi[static_cast<std::size_t>(wider.phi_index("x"))] ==
        fresh.pi[static_cast<std::size_t>(fresh.phi_index("x"))]);
  std::filesystem::remove_all(dir);
}

TEST_CASE("cache keys spell out every identifying input") {
  CHECK(oracle_cache_key("linear_ou", 0xabcULL, 1000, 10, 7) ==
        "bootstrap_linear_ou_0000000000000abc_N1000_B10_s7");
  CHECK(oracle_cache_key("linear_ou", 0xabcULL, 1000, 10, 8) !=
        oracle_cache_key("linear_ou", 0xabcULL, 1000, 10, 7));
  CHECK(oracle_cache_key("linear_ou", 0xabdULL, 1000, 10, 7) !=
        oracle_cache_key("linear_ou", 0xabcULL, 1000, 10, 7));
}

TEST_CASE("series lookup helpers find times and functionals") {
  Model m = make_builtin_model("linear_ou");
  TimeGrid g = TimeGrid::create(5e-3, 0.05, 0.25);
  std::vector<TestFunction> phis = {make_test_function("x"),
                                    make_test_function("sin")};
  OracleSeries s = bootstrap_oracle(m, make_obs(m, g, 41), 300, 41, phis, 3);
  CHECK(s.phi_index("sin") == 1);
  CHECK(s.phi_index("cos") == -1);
  CHECK(s.time_index(0.25) == static_cast<long>(s.times.size()) - 1);
  CHECK(s.time_index(0.123) == -1);
}
