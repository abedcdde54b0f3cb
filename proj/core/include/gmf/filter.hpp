#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gmf/gaussmix.hpp"
#include "gmf/model.hpp"
#include "gmf/paths.hpp"
#include "gmf/rng.hpp"
#include "gmf/time_grid.hpp"

namespace gmf {

/// Parameters of the Gaussian mixture filter. alpha = n^-epsilon sets the
/// particle variances; beta is the smoothing parameter (post-correction
/// variance is alpha*beta).
struct FilterConfig {
  int n = 0;
  double epsilon = 0.5;
  double beta = 1.0;
  double alpha = 0.0;
  TimeGrid grid;

  /// Production constructor: requires epsilon in (0, 1].
  static FilterConfig from_epsilon(int n, double epsilon, double beta,
                                   const TimeGrid& grid);

  /// Explicit-alpha constructor for the degenerate regimes: alpha = 0 is the
  /// Dirac (bootstrap) filter, alpha = 1 the deterministic-mean limit.
  static FilterConfig with_alpha(int n, double alpha, double beta,
                                 const TimeGrid& grid);

  double mean_noise_coeff() const;  // sqrt(1 - alpha)
};

/// One Gaussian particle: the triple (a_j, v_j, w_j) with the weight kept in
/// log space so positivity is structural.
struct Particle {
  double log_weight = 0.0;
  double mean = 0.0;
  double variance = 0.0;
};

/// Particle population plus the xi accumulator of mean weights at past
/// corrections (in log space) and interval bookkeeping.
struct FilterState {
  std::vector<Particle> particles;
  double log_xi = 0.0;
  long step = 0;           // substep index on the grid
  int interval_index = 0;  // completed corrections

  double time(const TimeGrid& grid) const { return grid.time_at(step); }

  /// Normalised weights, sum exactly 1 by construction.
  std::vector<double> normalized_weights() const;

  /// The state's mixture with normalised weights.
  WeightedMixture mixture() const;

  /// pi^n(phi) = sum_j abar_j Gamma_{v_j,w_j}(phi).
  double pi(const TestFunction& phi) const;

  /// Same weighted average with every component collapsed to a point mass at
  /// its mean; the difference to pi() is the variance contribution.
  double pi_point_mass(const TestFunction& phi) const;

  /// rho^n(phi) = exp(log_xi) (1/n) sum_j a_j Gamma_{v_j,w_j}(phi).
  double rho(const TestFunction& phi) const;

  /// rho^n(1) = exp(log_xi) (1/n) sum_j a_j.
  double rho_one() const;

  /// True when `step` sits on a correction boundary whose correction has not
  /// run yet.
  bool correction_pending(const TimeGrid& grid) const;
};

FilterState init_filter(const FilterConfig& cfg, const Model& model,
                        RngStream& rng);

/// One Euler substep of the triple process over [t, t+dt):
///   log a_j += h(v_j) dY - h(v_j)^2 dt / 2          (exact log form)
///   v_j     += f(v_j) dt + sqrt(1-alpha) sigma(v_j) sqrt(dt) Z_j
///   w_j     += alpha sigma(v_j)^2 dt
/// with all three right-hand sides evaluated at the pre-update v_j.
void evolve_substep(FilterState& state, double dY, const FilterConfig& cfg,
                    const Model& model, RngStream& rng);

/// Multinomial offspring counts: n samples with replacement according to
/// `weights` (must be >= 0, sum to 1 within 1e-9). Sum of counts is n.
std::vector<long> multinomial_offspring(std::span<const double> weights,
                                        long n, RngStream& rng);

/// Correction at a boundary i*delta: absorbs the mean weight into log_xi,
/// samples X_j ~ N(v_j, w_j) for every particle, draws one multinomial over
/// the X_j population, and rebuilds n particles with weight 1, mean X_j and
/// variance alpha*beta.
void correct(FilterState& state, const FilterConfig& cfg, RngStream& rng);

enum class RecordMode {
  kTerminal,     // t = T only
  kCorrections,  // t = 0 and every i*delta (post-correction values)
  kEverySubstep  // every grid time
};

struct RunOptions {
  RecordMode mode = RecordMode::kCorrections;
  std::vector<TestFunction> phis;
  /// When set, the variance-contribution gap |pi - pi_pointmass| for this
  /// function is recorded just before every correction.
  std::optional<TestFunction> gap_phi;
  bool keep_final_state = false;
};

/// Time series of pi^n(phi) and rho^n(phi) at the recorded times, with
/// rho^n(1) always included. Values at correction times are the
/// post-correction (right-continuous) ones.
struct FilterTrajectory {
  std::vector<std::string> phi_names;
  std::vector<double> times;
  std::vector<int> intervals;
  std::vector<double> rho_one;
  std::vector<std::vector<double>> pi;   // [phi][record]
  std::vector<std::vector<double>> rho;  // [phi][record]
  std::vector<double> gap_times;         // pre-correction boundaries
  std::vector<double> gaps;
  std::optional<FilterState> final_state;

  int phi_index(const std::string& name) const;  // -1 if absent
  long time_index(double t) const;               // -1 if absent
};

/// Full run: init, alternate delta/dt substeps and corrections through T
/// (a correction fires at T itself since T = N*delta).
FilterTrajectory run_filter(const FilterConfig& cfg, const Model& model,
                            const ObservationPath& obs,
                            const RunOptions& options, RngStream& rng);

void write_trajectory_csv(const std::string& path,
                          const FilterTrajectory& traj);

}  // namespace gmf
