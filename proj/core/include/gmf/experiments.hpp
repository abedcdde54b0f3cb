#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gmf/config.hpp"
#include "gmf/model.hpp"
#include "gmf/stats.hpp"
#include "gmf/time_grid.hpp"

namespace gmf {

/// L2-rate study on one shared observation path (streams 0/1 of
/// observation_seed): for each n, `replicas` filter runs with disjoint
/// particle streams (2 + i_n * replicas + r on master_seed) against the
/// model's reference filter, then a weighted log-log fit of MSE against n.
struct ConvergenceStudyConfig {
  Model model;
  TestFunction phi;
  double epsilon = 0.5;
  double beta = 1.0;
  std::vector<int> n_grid;
  int replicas = 0;
  TimeGrid grid;
  std::uint64_t master_seed = 0;
  std::uint64_t observation_seed = 0;
  double slope_min = 0.0;  // acceptance band on the fitted slope
  double slope_max = 0.0;
  long oracle_particles = 1000000;  // nonlinear models only
  int oracle_batches = 20;
  std::string oracle_cache_dir;
  int threads = 1;
};

struct ConvergencePoint {
  int n = 0;
  double mse = 0.0;
  double se = 0.0;       // standard error of the MSE estimate
  double mse_mid = 0.0;  // interior checkpoint, reported but not gated
};

struct ConvergenceReport {
  std::string model, phi;
  double epsilon = 0.0;
  int replicas = 0;
  std::uint64_t master_seed = 0;
  std::uint64_t observation_seed = 0;
  std::uint64_t observation_hash = 0;
  double mid_time = 0.0;
  std::vector<ConvergencePoint> points;
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
  double predicted_slope = 0.0;  // -min(2 epsilon, 1)
  double slope_min = 0.0, slope_max = 0.0;
  bool mse_decreasing = false;  // MSE at n_max below MSE at n_min
  bool pass = false;
};

ConvergenceStudyConfig make_convergence_config(const StudyConfig& cfg,
                                               int threads);
ConvergenceReport run_convergence_study(const ConvergenceStudyConfig& cfg);

/// Distribution study at the terminal time on one frozen observation path:
/// per n, `replicas` independent filter runs (particle stream
/// 2 + i_n * replicas + r on master_seed) give samples of
/// n^epsilon (rho_n_T(phi) - rho_T(phi)); the report carries per-n moments,
/// the KS distance of the standardized sample to N(0,1), and variance
/// ratios across quadrupled n.
struct CltStudyConfig {
  Model model;
  TestFunction phi;
  double epsilon = 0.5;
  double beta = 1.0;
  std::vector<int> n_grid;
  int replicas = 0;
  TimeGrid grid;
  std::uint64_t master_seed = 0;
  std::uint64_t observation_seed = 0;
  double var_ratio_min = 0.4;  // stabilization band for Var_n / Var_4n
  double var_ratio_max = 2.5;
  double ks_level = 0.01;
  double ks_factor = 1.5;
  double divergence_min_ratio = 2.0;  // Var_4n / Var_n when epsilon > 1/2
  long oracle_particles = 1000000;
  int oracle_batches = 20;
  std::string oracle_cache_dir;
  int threads = 1;
};

struct CltPoint {
  int n = 0;
  SummaryStats stats;
  double ks_stat = 0.0;
  std::vector<double> samples;  // one U value per replica
};

struct VarianceRatio {
  int n_small = 0, n_large = 0;
  double small_over_large = 0.0;  // Var_{n} / Var_{4n}
};

struct CltReport {
  std::string model, phi;
  double epsilon = 0.0;
  int replicas = 0;
  std::uint64_t master_seed = 0;
  std::uint64_t observation_seed = 0;
  std::uint64_t observation_hash = 0;
  double rho_ref = 0.0;  // oracle rho_T(phi) on the frozen path
  bool diverging_regime = false;  // epsilon > 1/2
  std::vector<CltPoint> points;
  std::vector<VarianceRatio> var_ratios;
  double ks_critical = 0.0;  // at ks_level for `replicas` samples
  bool pass_var = false;
  bool pass_ks = false;  // stabilizing regime only; true otherwise
  bool pass = false;
};

CltStudyConfig make_clt_config(const StudyConfig& cfg, int threads);
CltReport run_clt_study(const CltStudyConfig& cfg);

/// "<model>_<phi>_eps<epsilon>" used in report file names.
std::string study_tag(const std::string& model, const std::string& phi,
                      double epsilon);

/// convergence_<tag>.csv: n, mse, stderr, log_n, log_mse
/// convergence_<tag>.json: slope, stderr, predicted_slope, pass, ...
void write_convergence_csv(const std::string& path,
                           const ConvergenceReport& report);
void write_convergence_json(const std::string& path,
                            const ConvergenceReport& report);

/// clt_<tag>.csv: n, replica, U_value
/// clt_<tag>.json: per-n moments + ks, variance ratios, pass flags
void write_clt_csv(const std::string& path, const CltReport& report);
void write_clt_json(const std::string& path, const CltReport& report);

}  // namespace gmf
