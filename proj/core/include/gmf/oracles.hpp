#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gmf/model.hpp"
#include "gmf/paths.hpp"
#include "gmf/rng.hpp"
#include "gmf/time_grid.hpp"

namespace gmf {

/// Exact conditional moments of a linear-Gaussian model plus log rho_t(1),
/// one entry per grid time.
struct MomentPath {
  TimeGrid grid;
  std::vector<double> mean;      // m_t
  std::vector<double> variance;  // P_t >= 0
  std::vector<double> log_rho1;  // log rho_t(1), starts at 0

  double pi_at(long k, const TestFunction& phi) const;
  double rho_at(long k, const TestFunction& phi) const;
};

/// Euler-discretized Kalman-Bucy filter on the observation grid:
///   dm = -theta m dt + gamma P (dY - gamma m dt)
///   dP = (-2 theta P + sigma0^2 - gamma^2 P^2) dt
///   d log rho(1) = gamma m dY - gamma^2 m^2 dt / 2
/// Same dt as the particle filter so discretization bias is shared rather
/// than compared. Throws "oracle requires linear model" otherwise.
MomentPath kalman_bucy(const Model& model, const ObservationPath& obs);

/// rho_t(phi) = rho_t(1) * pi_t(phi) on every grid time.
std::vector<double> rho_series(const MomentPath& path, const TestFunction& phi);
std::vector<double> rho_reference(const Model& model,
                                  const ObservationPath& obs,
                                  const TestFunction& phi);

/// Bootstrap (Dirac, alpha = 0) particle estimates at correction times.
/// With batches > 1 the population is split into independent sub-filters and
/// every estimate carries an honest empirical standard error
/// (sd over batches / sqrt(batches)); with batches = 1 the stderr columns
/// are NaN.
struct OracleSeries {
  std::vector<double> times;
  std::vector<std::string> phi_names;
  std::vector<std::vector<double>> pi;      // [phi][time]
  std::vector<std::vector<double>> pi_se;   // [phi][time]
  std::vector<std::vector<double>> rho;     // [phi][time]
  std::vector<std::vector<double>> rho_se;  // [phi][time]
  std::vector<double> rho_one;
  std::vector<double> rho_one_se;
  long total_particles = 0;
  int batches = 1;

  int phi_index(const std::string& name) const;  // -1 if absent
  long time_index(double t) const;               // -1 if absent
};

/// Runs the filter with alpha forced to 0 (point-mass particles, omega = 0,
/// full-strength mean noise) and the same delta-periodic multinomial
/// corrections. N is the total particle count across batches. Particle
/// randomness comes from RngStream(seed, 2 + b) for batch b.
OracleSeries bootstrap_oracle(const Model& model, const ObservationPath& obs,
                              long n_particles, std::uint64_t seed,
                              std::span<const TestFunction> phis,
                              int batches = 1, int threads = 1);

/// Disk cache keyed by (model, observation content hash, N, batches, seed).
/// Returns the cached series when present and covering `phis`; otherwise
/// computes and stores it. cache_dir empty disables caching.
OracleSeries bootstrap_oracle_cached(const Model& model,
                                     const ObservationPath& obs,
                                     long n_particles, std::uint64_t seed,
                                     std::span<const TestFunction> phis,
                                     int batches, int threads,
                                     const std::string& cache_dir);

std::string oracle_cache_key(const std::string& model_name,
                             std::uint64_t obs_hash, long n_particles,
                             int batches, std::uint64_t seed);

}  // namespace gmf
