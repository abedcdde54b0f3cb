#include "gmf/paths.hpp"

#include <cmath>
#include <stdexcept>

#include "gmf/csv.hpp"

namespace gmf {

SignalPath simulate_signal(const Model& model, const TimeGrid& grid,
                           RngStream& rng) {
  SignalPath path;
  path.grid = grid;
  path.values.resize(static_cast<std::size_t>(grid.steps) + 1);
  double x = model.initial_mean();
  if (model.initial_stddev() > 0.0) x += model.initial_stddev() * rng.normal();
  path.values[0] = x;
  const double dt = grid.dt;
  const double sqrt_dt = std::sqrt(dt);
  for (long k = 0; k < grid.steps; ++k) {
    x += model.drift(x) * dt + model.diffusion(x) * sqrt_dt * rng.normal();
    path.values[static_cast<std::size_t>(k) + 1] = x;
  }
  return path;
}

ObservationPath simulate_observation(const Model& model,
                                     const SignalPath& signal, RngStream& rng,
                                     double noise_scale) {
  ObservationPath obs;
  obs.grid = signal.grid;
  const long steps = obs.grid.steps;
  obs.increments.resize(static_cast<std::size_t>(steps));
  obs.cumulative.resize(static_cast<std::size_t>(steps) + 1);
  obs.cumulative[0] = 0.0;
  const double dt = obs.grid.dt;
  const double sqrt_dt = std::sqrt(dt);
  for (long k = 0; k < steps; ++k) {
    // left-point h, matching the Ito integral
    double dy = model.sensor(signal.values[static_cast<std::size_t>(k)]) * dt +
                noise_scale * sqrt_dt * rng.normal();
    obs.increments[static_cast<std::size_t>(k)] = dy;
    obs.cumulative[static_cast<std::size_t>(k) + 1] =
        obs.cumulative[static_cast<std::size_t>(k)] + dy;
  }
  return obs;
}

ObservationPath reference_observation(const TimeGrid& grid, RngStream& rng) {
  ObservationPath obs;
  obs.grid = grid;
  obs.increments.resize(static_cast<std::size_t>(grid.steps));
  obs.cumulative.resize(static_cast<std::size_t>(grid.steps) + 1);
  obs.cumulative[0] = 0.0;
  const double sqrt_dt = std::sqrt(grid.dt);
  for (long k = 0; k < grid.steps; ++k) {
    double dy = sqrt_dt * rng.normal();
    obs.increments[static_cast<std::size_t>(k)] = dy;
    obs.cumulative[static_cast<std::size_t>(k) + 1] =
        obs.cumulative[static_cast<std::size_t>(k)] + dy;
  }
  return obs;
}

ObservationPath coarsen_observation(const ObservationPath& obs, long factor) {
  if (factor < 1 || obs.grid.steps_per_correction % factor != 0)
    throw std::invalid_argument(
        "coarsening factor must divide steps_per_correction");
  ObservationPath out;
  out.grid = TimeGrid::create(obs.grid.dt * static_cast<double>(factor),
                              obs.grid.correction_interval, obs.grid.horizon);
  out.increments.resize(static_cast<std::size_t>(out.grid.steps));
  out.cumulative.resize(static_cast<std::size_t>(out.grid.steps) + 1);
  out.cumulative[0] = 0.0;
  for (long k = 0; k < out.grid.steps; ++k) {
    double sum = 0.0;
    for (long j = 0; j < factor; ++j)
      sum += obs.increments[static_cast<std::size_t>(k * factor + j)];
    out.increments[static_cast<std::size_t>(k)] = sum;
    out.cumulative[static_cast<std::size_t>(k) + 1] =
        out.cumulative[static_cast<std::size_t>(k)] + sum;
  }
  return out;
}

void write_signal_csv(const std::string& path, const SignalPath& signal) {
  CsvWriter w(path, {"t", "X"});
  for (long k = 0; k <= signal.grid.steps; ++k)
    w.row({signal.grid.time_at(k), signal.values[static_cast<std::size_t>(k)]});
}

void write_observation_csv(const std::string& path,
                           const ObservationPath& obs) {
  CsvWriter w(path, {"t", "dY", "Y"});
  for (long k = 0; k <= obs.grid.steps; ++k) {
    double dy =
        k < obs.grid.steps ? obs.increments[static_cast<std::size_t>(k)] : 0.0;
    w.row({obs.grid.time_at(k), dy, obs.cumulative[static_cast<std::size_t>(k)]});
  }
}

ObservationPath read_observation_csv(const std::string& path, double delta) {
  CsvTable table = read_csv(path);
  int tc = table.column("t"), dc = table.column("dY");
  if (tc < 0 || dc < 0)
    throw std::runtime_error("observation CSV needs columns t, dY: " + path);
  if (table.rows.size() < 2)
    throw std::runtime_error("observation CSV has no increments: " + path);
  const std::size_t steps = table.rows.size() - 1;
  double dt = table.rows[1][static_cast<std::size_t>(tc)] -
              table.rows[0][static_cast<std::size_t>(tc)];
  double horizon = table.rows[steps][static_cast<std::size_t>(tc)];
  ObservationPath obs;
  obs.grid = TimeGrid::create(dt, delta, horizon);
  if (static_cast<std::size_t>(obs.grid.steps) != steps)
    throw std::runtime_error("observation CSV rows inconsistent with grid");
  obs.increments.resize(steps);
  obs.cumulative.assign(steps + 1, 0.0);
  for (std::size_t k = 0; k < steps; ++k) {
    obs.increments[k] = table.rows[k][static_cast<std::size_t>(dc)];
    obs.cumulative[k + 1] = obs.cumulative[k] + obs.increments[k];
  }
  return obs;
}

std::uint64_t observation_content_hash(const ObservationPath& obs) {
  return fnv1a64(obs.increments.data(),
                 obs.increments.size() * sizeof(double));
}

}  // namespace gmf
