#include "gmf/oracles.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <stdexcept>

#include "gmf/csv.hpp"
#include "gmf/filter.hpp"
#include "gmf/gaussmix.hpp"
#include "gmf/parallel.hpp"

namespace gmf {

double MomentPath::pi_at(long k, const TestFunction& phi) const {
  return gauss_expect({mean[static_cast<std::size_t>(k)],
                       variance[static_cast<std::size_t>(k)]},
                      phi);
}

double MomentPath::rho_at(long k, const TestFunction& phi) const {
  return std::exp(log_rho1[static_cast<std::size_t>(k)]) * pi_at(k, phi);
}

MomentPath kalman_bucy(const Model& model, const ObservationPath& obs) {
  if (!model.linear())
    throw std::invalid_argument("oracle requires linear model");
  const auto& c = *model.linear();
  const TimeGrid& grid = obs.grid;
  const double dt = grid.dt;

  MomentPath out;
  out.grid = grid;
  out.mean.resize(static_cast<std::size_t>(grid.steps) + 1);
  out.variance.resize(out.mean.size());
  out.log_rho1.resize(out.mean.size());
  double m = model.initial_mean();
  double P = model.initial_stddev() * model.initial_stddev();
  double logr = 0.0;
  out.mean[0] = m;
  out.variance[0] = P;
  out.log_rho1[0] = 0.0;
  for (long k = 0; k < grid.steps; ++k) {
    const double dY = obs.increments[static_cast<std::size_t>(k)];
    const double m_next =
        m - c.theta * m * dt + c.gamma * P * (dY - c.gamma * m * dt);
    const double P_next =
        P + (-2.0 * c.theta * P + c.sigma0 * c.sigma0 -
             c.gamma * c.gamma * P * P) *
                dt;
    // Mass picks up the factor E_{N(m,P)}[exp(g x dY - g^2 x^2 dt / 2)] per
    // step (closed form for linear h), the same weight convention the
    // particle filter aggregates.  Plain Euler on d log rho(1) drops the
    // g^2 P (dY^2 - dt)/2 fluctuation and drifts O(sqrt(dt)) away from any
    // particle mass estimate on a fixed path.
    const double g = c.gamma;
    const double denom = 1.0 + g * g * P * dt;
    logr += -0.5 * std::log1p(g * g * P * dt) +
            (g * m * dY - 0.5 * g * g * m * m * dt +
             0.5 * g * g * P * dY * dY) /
                denom;
    if (P_next < 0.0)
      throw std::runtime_error("Riccati variance went negative; dt too coarse");
    m = m_next;
    P = P_next;
    out.mean[static_cast<std::size_t>(k) + 1] = m;
    out.variance[static_cast<std::size_t>(k) + 1] = P;
    out.log_rho1[static_cast<std::size_t>(k) + 1] = logr;
  }
  return out;
}

std::vector<double> rho_series(const MomentPath& path,
                               const TestFunction& phi) {
  std::vector<double> out(path.mean.size());
  for (std::size_t k = 0; k < out.size(); ++k)
    out[k] = path.rho_at(static_cast<long>(k), phi);
  return out;
}

std::vector<double> rho_reference(const Model& model,
                                  const ObservationPath& obs,
                                  const TestFunction& phi) {
  return rho_series(kalman_bucy(model, obs), phi);
}

int OracleSeries::phi_index(const std::string& name) const {
  for (std::size_t i = 0; i < phi_names.size(); ++i)
    if (phi_names[i] == name) return static_cast<int>(i);
  return -1;
}

long OracleSeries::time_index(double t) const {
  for (std::size_t i = 0; i < times.size(); ++i)
    if (std::abs(times[i] - t) < 1e-12) return static_cast<long>(i);
  return -1;
}

OracleSeries bootstrap_oracle(const Model& model, const ObservationPath& obs,
                              long n_particles, std::uint64_t seed,
                              std::span<const TestFunction> phis,
                              int batches, int threads) {
  if (batches < 1) throw std::invalid_argument("batches must be >= 1");
  if (n_particles < batches * 2)
    throw std::invalid_argument("too few particles per batch");
  const long per_batch = n_particles / batches;

  RunOptions options;
  options.mode = RecordMode::kCorrections;
  options.phis.assign(phis.begin(), phis.end());

  std::vector<FilterTrajectory> runs(static_cast<std::size_t>(batches));
  parallel_for(0, batches, threads, [&](long b) {
    FilterConfig cfg = FilterConfig::with_alpha(static_cast<int>(per_batch),
                                                0.0, 1.0, obs.grid);
    RngStream rng(seed, kParticleStreamBase + static_cast<std::uint64_t>(b));
    runs[static_cast<std::size_t>(b)] =
        run_filter(cfg, model, obs, options, rng);
  });

  const auto& t0 = runs[0];
  OracleSeries out;
  out.times = t0.times;
  out.phi_names = t0.phi_names;
  out.total_particles = per_batch * batches;
  out.batches = batches;
  const std::size_t nt = out.times.size();
  const std::size_t np = phis.size();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  out.pi.assign(np, std::vector<double>(nt, 0.0));
  out.pi_se.assign(np, std::vector<double>(nt, nan));
  out.rho.assign(np, std::vector<double>(nt, 0.0));
  out.rho_se.assign(np, std::vector<double>(nt, nan));
  out.rho_one.assign(nt, 0.0);
  out.rho_one_se.assign(nt, nan);

  auto combine = [&](auto value, std::vector<double>& mean_out,
                     std::vector<double>& se_out) {
    for (std::size_t i = 0; i < nt; ++i) {
      double mean = 0.0;
      for (int b = 0; b < batches; ++b) mean += value(b, i);
      mean /= static_cast<double>(batches);
      mean_out[i] = mean;
      if (batches > 1) {
        double ss = 0.0;
        for (int b = 0; b < batches; ++b) {
          const double d = value(b, i) - mean;
          ss += d * d;
        }
        se_out[i] = std::sqrt(ss / static_cast<double>(batches - 1) /
                              static_cast<double>(batches));
      }
    }
  };

  combine([&](int b, std::size_t i) { return runs[b].rho_one[i]; },
          out.rho_one, out.rho_one_se);
  for (std::size_t f = 0; f < np; ++f) {
    combine([&](int b, std::size_t i) { return runs[b].pi[f][i]; }, out.pi[f],
            out.pi_se[f]);
    combine([&](int b, std::size_t i) { return runs[b].rho[f][i]; },
            out.rho[f], out.rho_se[f]);
  }
  return out;
}

std::string oracle_cache_key(const std::string& model_name,
                             std::uint64_t obs_hash, long n_particles,
                             int batches, std::uint64_t seed) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "bootstrap_%s_%016llx_N%ld_B%d_s%llu",
                model_name.c_str(),
                static_cast<unsigned long long>(obs_hash), n_particles,
                batches, static_cast<unsigned long long>(seed));
  return buf;
}

namespace {

bool load_cached(const std::string& file, std::span<const TestFunction> phis,
                 OracleSeries& out) {
  if (!std::filesystem::exists(file)) return false;
  CsvTable table = read_csv(file);
  const int tc = table.column("t");
  const int r1 = table.column("rho_one");
  const int r1se = table.column("rho_one_se");
  if (tc < 0 || r1 < 0 || r1se < 0) return false;
  const std::size_t nt = table.rows.size();
  out = OracleSeries{};
  out.times.resize(nt);
  out.rho_one.resize(nt);
  out.rho_one_se.resize(nt);
  for (std::size_t i = 0; i < nt; ++i) {
    out.times[i] = table.rows[i][static_cast<std::size_t>(tc)];
    out.rho_one[i] = table.rows[i][static_cast<std::size_t>(r1)];
    out.rho_one_se[i] = table.rows[i][static_cast<std::size_t>(r1se)];
  }
  for (const auto& phi : phis) {
    const int pc = table.column("pi_" + phi.name());
    const int psc = table.column("pi_se_" + phi.name());
    const int rc = table.column("rho_" + phi.name());
    const int rsc = table.column("rho_se_" + phi.name());
    if (pc < 0 || psc < 0 || rc < 0 || rsc < 0) return false;
    out.phi_names.push_back(phi.name());
    std::vector<double> p(nt), pse(nt), r(nt), rse(nt);
    for (std::size_t i = 0; i < nt; ++i) {
      p[i] = table.rows[i][static_cast<std::size_t>(pc)];
      pse[i] = table.rows[i][static_cast<std::size_t>(psc)];
      r[i] = table.rows[i][static_cast<std::size_t>(rc)];
      rse[i] = table.rows[i][static_cast<std::size_t>(rsc)];
    }
    out.pi.push_back(std::move(p));
    out.pi_se.push_back(std::move(pse));
    out.rho.push_back(std::move(r));
    out.rho_se.push_back(std::move(rse));
  }
  return true;
}

void store_cached(const std::string& file, const OracleSeries& series) {
  std::vector<std::string> header = {"t", "rho_one", "rho_one_se"};
  for (const auto& name : series.phi_names) {
    header.push_back("pi_" + name);
    header.push_back("pi_se_" + name);
    header.push_back("rho_" + name);
    header.push_back("rho_se_" + name);
  }
  CsvWriter w(file, header);
  for (std::size_t i = 0; i < series.times.size(); ++i) {
    std::vector<double> row = {series.times[i], series.rho_one[i],
                               series.rho_one_se[i]};
    for (std::size_t f = 0; f < series.phi_names.size(); ++f) {
      row.push_back(series.pi[f][i]);
      row.push_back(series.pi_se[f][i]);
      row.push_back(series.rho[f][i]);
      row.push_back(series.rho_se[f][i]);
    }
    w.row(row);
  }
}

}  // namespace

OracleSeries bootstrap_oracle_cached(const Model& model,
                                     const ObservationPath& obs,
                                     long n_particles, std::uint64_t seed,
                                     std::span<const TestFunction> phis,
                                     int batches, int threads,
                                     const std::string& cache_dir) {
  if (cache_dir.empty())
    return bootstrap_oracle(model, obs, n_particles, seed, phis, batches,
                            threads);
  std::filesystem::create_directories(cache_dir);
  const std::string file =
      (std::filesystem::path(cache_dir) /
       (oracle_cache_key(model.name(), observation_content_hash(obs),
                         n_particles, batches, seed) +
        ".csv"))
          .string();
  OracleSeries cached;
  if (load_cached(file, phis, cached)) {
    cached.total_particles = n_particles;
    cached.batches = batches;
    return cached;
  }
  OracleSeries fresh =
      bootstrap_oracle(model, obs, n_particles, seed, phis, batches, threads);
  store_cached(file, fresh);
  return fresh;
}

}  // namespace gmf
