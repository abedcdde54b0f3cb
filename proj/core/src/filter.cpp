#include "gmf/filter.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "gmf/csv.hpp"

namespace gmf {

FilterConfig FilterConfig::from_epsilon(int n, double epsilon, double beta,
                                        const TimeGrid& grid) {
  if (n < 2) throw std::invalid_argument("particle count n must be >= 2");
  if (!(epsilon > 0.0) || epsilon > 1.0)
    throw std::invalid_argument("epsilon must be in (0, 1]");
  if (!(beta > 0.0)) throw std::invalid_argument("beta must be > 0");
  FilterConfig cfg;
  cfg.n = n;
  cfg.epsilon = epsilon;
  cfg.beta = beta;
  cfg.alpha = std::pow(static_cast<double>(n), -epsilon);
  cfg.grid = grid;
  return cfg;
}

FilterConfig FilterConfig::with_alpha(int n, double alpha, double beta,
                                      const TimeGrid& grid) {
  if (n < 1) throw std::invalid_argument("particle count n must be >= 1");
  if (alpha < 0.0 || alpha > 1.0)
    throw std::invalid_argument("alpha must be in [0, 1]");
  if (!(beta > 0.0)) throw std::invalid_argument("beta must be > 0");
  FilterConfig cfg;
  cfg.n = n;
  cfg.epsilon = std::numeric_limits<double>::quiet_NaN();
  cfg.beta = beta;
  cfg.alpha = alpha;
  cfg.grid = grid;
  return cfg;
}

double FilterConfig::mean_noise_coeff() const { return std::sqrt(1.0 - alpha); }

std::vector<double> FilterState::normalized_weights() const {
  // log-sum-exp normalisation
  double m = particles[0].log_weight;
  for (const auto& p : particles) m = std::max(m, p.log_weight);
  std::vector<double> w(particles.size());
  double sum = 0.0;
  for (std::size_t j = 0; j < particles.size(); ++j) {
    w[j] = std::exp(particles[j].log_weight - m);
    sum += w[j];
  }
  for (auto& x : w) x /= sum;
  return w;
}

WeightedMixture FilterState::mixture() const {
  WeightedMixture mix;
  auto w = normalized_weights();
  mix.components.resize(particles.size());
  for (std::size_t j = 0; j < particles.size(); ++j)
    mix.components[j] = {w[j], {particles[j].mean, particles[j].variance}};
  return mix;
}

double FilterState::pi(const TestFunction& phi) const {
  auto w = normalized_weights();
  double acc = 0.0;
  for (std::size_t j = 0; j < particles.size(); ++j)
    acc += w[j] * gauss_expect({particles[j].mean, particles[j].variance}, phi);
  return acc;
}

double FilterState::pi_point_mass(const TestFunction& phi) const {
  auto w = normalized_weights();
  double acc = 0.0;
  for (std::size_t j = 0; j < particles.size(); ++j)
    acc += w[j] * phi(particles[j].mean);
  return acc;
}

double FilterState::rho(const TestFunction& phi) const {
  double acc = 0.0;
  for (const auto& p : particles)
    acc += std::exp(p.log_weight) * gauss_expect({p.mean, p.variance}, phi);
  return std::exp(log_xi) * acc / static_cast<double>(particles.size());
}

double FilterState::rho_one() const {
  double acc = 0.0;
  for (const auto& p : particles) acc += std::exp(p.log_weight);
  return std::exp(log_xi) * acc / static_cast<double>(particles.size());
}

bool FilterState::correction_pending(const TimeGrid& grid) const {
  return grid.is_correction_step(step) &&
         interval_index !=
             static_cast<int>(step / grid.steps_per_correction);
}

FilterState init_filter(const FilterConfig& cfg, const Model& model,
                        RngStream& rng) {
  FilterState state;
  state.particles.resize(static_cast<std::size_t>(cfg.n));
  const double w0 = cfg.alpha * cfg.beta;
  for (auto& p : state.particles) {
    p.log_weight = 0.0;
    p.mean = model.initial_mean();
    if (model.initial_stddev() > 0.0)
      p.mean += model.initial_stddev() * rng.normal();
    p.variance = w0;
  }
  return state;
}

void evolve_substep(FilterState& state, double dY, const FilterConfig& cfg,
                    const Model& model, RngStream& rng) {
  if (state.step >= cfg.grid.steps)
    throw std::logic_error("evolve_substep past the terminal time");
  if (state.correction_pending(cfg.grid))
    throw std::logic_error("correction pending at this boundary");
  const double dt = cfg.grid.dt;
  const double sqrt_dt = std::sqrt(dt);
  const double noise = cfg.mean_noise_coeff();
  for (auto& p : state.particles) {
    const double v = p.mean;
    const double hv = model.sensor(v);
    const double sv = model.diffusion(v);
    p.log_weight += hv * dY - 0.5 * hv * hv * dt;
    p.variance += cfg.alpha * sv * sv * dt;
    p.mean = v + model.drift(v) * dt + noise * sv * sqrt_dt * rng.normal();
  }
  ++state.step;
}

std::vector<long> multinomial_offspring(std::span<const double> weights,
                                        long n, RngStream& rng) {
  double sum = 0.0;
  for (double w : weights) {
    if (w < 0.0 || !std::isfinite(w))
      throw std::invalid_argument("invalid weights");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw std::invalid_argument("weights must sum to 1");

  // conditional binomial decomposition of the multinomial
  std::vector<long> counts(weights.size(), 0);
  long remaining = n;
  double wsum_left = 1.0;
  for (std::size_t j = 0; j + 1 < weights.size() && remaining > 0; ++j) {
    double p = weights[j] / wsum_left;
    long c;
    if (p >= 1.0) {
      c = remaining;
    } else {
      std::binomial_distribution<long> bin(remaining, std::max(p, 0.0));
      c = bin(rng.engine());
    }
    counts[j] = c;
    remaining -= c;
    wsum_left -= weights[j];
  }
  if (!counts.empty()) counts.back() += remaining;
  return counts;
}

void correct(FilterState& state, const FilterConfig& cfg, RngStream& rng) {
  const TimeGrid& grid = cfg.grid;
  if (!grid.is_correction_step(state.step) ||
      !state.correction_pending(grid))
    throw std::logic_error("not a correction time");

  // mean weight -> xi, stable in log space
  double m = state.particles[0].log_weight;
  for (const auto& p : state.particles) m = std::max(m, p.log_weight);
  double sum = 0.0;
  for (const auto& p : state.particles) sum += std::exp(p.log_weight - m);
  state.log_xi +=
      m + std::log(sum / static_cast<double>(state.particles.size()));

  std::vector<double> abar(state.particles.size());
  for (std::size_t j = 0; j < abar.size(); ++j)
    abar[j] = std::exp(state.particles[j].log_weight - m) / sum;

  // offspring means first, one draw per current particle, then a single
  // multinomial over the population
  std::vector<double> offspring_mean(state.particles.size());
  for (std::size_t j = 0; j < state.particles.size(); ++j)
    offspring_mean[j] = state.particles[j].mean +
                        std::sqrt(state.particles[j].variance) * rng.normal();
  auto counts = multinomial_offspring(
      abar, static_cast<long>(state.particles.size()), rng);

  const double w0 = cfg.alpha * cfg.beta;
  std::vector<Particle> next;
  next.reserve(state.particles.size());
  for (std::size_t j = 0; j < counts.size(); ++j)
    for (long c = 0; c < counts[j]; ++c)
      next.push_back({0.0, offspring_mean[j], w0});
  state.particles = std::move(next);
  ++state.interval_index;
}

namespace {

double variance_gap(const FilterState& state, const TestFunction& phi) {
  return std::abs(state.pi(phi) - state.pi_point_mass(phi));
}

void record_point(FilterTrajectory& traj, const FilterState& state,
                  const TimeGrid& grid,
                  const std::vector<TestFunction>& phis) {
  traj.times.push_back(state.time(grid));
  traj.intervals.push_back(state.interval_index);
  const double xi = std::exp(state.log_xi);
  double mean_weight = 0.0;
  for (const auto& p : state.particles) mean_weight += std::exp(p.log_weight);
  mean_weight /= static_cast<double>(state.particles.size());
  const double rho_one = xi * mean_weight;
  traj.rho_one.push_back(rho_one);
  auto w = state.normalized_weights();
  for (std::size_t f = 0; f < phis.size(); ++f) {
    double pi_val = 0.0;
    for (std::size_t j = 0; j < state.particles.size(); ++j)
      pi_val += w[j] * gauss_expect({state.particles[j].mean,
                                     state.particles[j].variance},
                                    phis[f]);
    traj.pi[f].push_back(pi_val);
    traj.rho[f].push_back(rho_one * pi_val);
  }
}

}  // namespace

int FilterTrajectory::phi_index(const std::string& name) const {
  for (std::size_t i = 0; i < phi_names.size(); ++i)
    if (phi_names[i] == name) return static_cast<int>(i);
  return -1;
}

long FilterTrajectory::time_index(double t) const {
  for (std::size_t i = 0; i < times.size(); ++i)
    if (std::abs(times[i] - t) < 1e-12) return static_cast<long>(i);
  return -1;
}

FilterTrajectory run_filter(const FilterConfig& cfg, const Model& model,
                            const ObservationPath& obs,
                            const RunOptions& options, RngStream& rng) {
  if (!(obs.grid == cfg.grid))
    throw std::invalid_argument("observation grid does not match filter grid");

  FilterTrajectory traj;
  for (const auto& phi : options.phis) traj.phi_names.push_back(phi.name());
  traj.pi.resize(options.phis.size());
  traj.rho.resize(options.phis.size());

  FilterState state = init_filter(cfg, model, rng);
  const RecordMode mode = options.mode;

  if (mode != RecordMode::kTerminal)
    record_point(traj, state, cfg.grid, options.phis);
  for (long k = 0; k < cfg.grid.steps; ++k) {
    if (cfg.grid.is_correction_step(k)) {
      if (options.gap_phi) {
        traj.gap_times.push_back(state.time(cfg.grid));
        traj.gaps.push_back(variance_gap(state, *options.gap_phi));
      }
      correct(state, cfg, rng);
      if (mode != RecordMode::kTerminal)
        record_point(traj, state, cfg.grid, options.phis);
    }
    evolve_substep(state, obs.increments[static_cast<std::size_t>(k)], cfg,
                   model, rng);
    if (mode == RecordMode::kEverySubstep && k + 1 < cfg.grid.steps &&
        !cfg.grid.is_correction_step(k + 1))
      record_point(traj, state, cfg.grid, options.phis);
  }
  // terminal correction at T = N*delta
  if (options.gap_phi) {
    traj.gap_times.push_back(state.time(cfg.grid));
    traj.gaps.push_back(variance_gap(state, *options.gap_phi));
  }
  correct(state, cfg, rng);
  record_point(traj, state, cfg.grid, options.phis);

  if (options.keep_final_state) traj.final_state = state;
  return traj;
}

void write_trajectory_csv(const std::string& path,
                          const FilterTrajectory& traj) {
  std::vector<std::string> header = {"t", "interval", "rho_1"};
  for (const auto& name : traj.phi_names) header.push_back("pi_" + name);
  for (const auto& name : traj.phi_names) header.push_back("rho_" + name);
  CsvWriter w(path, header);
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    std::vector<double> row = {traj.times[i],
                               static_cast<double>(traj.intervals[i]),
                               traj.rho_one[i]};
    for (const auto& series : traj.pi) row.push_back(series[i]);
    for (const auto& series : traj.rho) row.push_back(series[i]);
    w.row(row);
  }
}

}  // namespace gmf
