#pragma once

#include <string>
#include <vector>

#include "gmf/model.hpp"
#include "gmf/rng.hpp"
#include "gmf/time_grid.hpp"

namespace gmf {

/// Euler-Maruyama sample path of the signal SDE dX = f(X)dt + sigma(X)dV.
struct SignalPath {
  TimeGrid grid;
  std::vector<double> values;  // length steps+1, values[0] ~ initial law
};

/// Observation increments dY = h(X)dt + dW on the same grid, Y_0 = 0.
/// Increments are the primary data; the cumulative path is bookkeeping.
struct ObservationPath {
  TimeGrid grid;
  std::vector<double> increments;  // length steps
  std::vector<double> cumulative;  // length steps+1, cumulative[0] = 0
};

SignalPath simulate_signal(const Model& model, const TimeGrid& grid,
                           RngStream& rng);

/// noise_scale is a test hook; 1.0 is the model of eq. dY = h(X)dt + dW,
/// 0.0 removes the observation noise entirely.
ObservationPath simulate_observation(const Model& model,
                                     const SignalPath& signal, RngStream& rng,
                                     double noise_scale = 1.0);

/// Pure-noise observation increments dY = dW (reference-measure hook for
/// martingale checks: no signal information at all).
ObservationPath reference_observation(const TimeGrid& grid, RngStream& rng);

/// Aggregates increments by `factor`, producing the same Brownian path on a
/// grid with dt' = factor*dt. factor must divide steps_per_correction.
ObservationPath coarsen_observation(const ObservationPath& obs, long factor);

void write_signal_csv(const std::string& path, const SignalPath& signal);
void write_observation_csv(const std::string& path, const ObservationPath& obs);
ObservationPath read_observation_csv(const std::string& path, double delta);

/// FNV-1a hash of the raw increment bytes; identifies an observation path in
/// oracle cache keys and manifests.
std::uint64_t observation_content_hash(const ObservationPath& obs);

}  // namespace gmf
