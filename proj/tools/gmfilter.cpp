// Command-line front end: simulation, single filter runs, rate and
// distribution studies, Zakai residual diagnostics. Exit codes: 0 success,
// 1 error, 2 ran fine but a study's pass flag is false.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gmf/config.hpp"
#include "gmf/csv.hpp"
#include "gmf/error_analysis.hpp"
#include "gmf/experiments.hpp"
#include "gmf/filter.hpp"
#include "gmf/oracles.hpp"
#include "gmf/parallel.hpp"
#include "gmf/paths.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

struct CommonArgs {
  std::string config_path;
  std::vector<std::string> sets;
  std::string out_dir;
  int threads = gmf::default_thread_count();
  std::uint64_t seed = 0;
  bool seed_given = false;
};

void add_common_flags(CLI::App* sub, CommonArgs& args) {
  sub->add_option("--config", args.config_path, "JSON config file");
  sub->add_option("--set", args.sets,
                  "key=value override, repeatable (n_grid takes a,b,c)");
  sub->add_option("--out", args.out_dir, "output directory");
  sub->add_option("--threads", args.threads, "worker cap for studies");
  sub->add_option("--seed", args.seed, "master seed (beats config and env)")
      ->each([&args](const std::string&) { args.seed_given = true; });
}

gmf::StudyConfig resolve_config(const CommonArgs& args) {
  gmf::StudyConfig cfg;
  if (!args.config_path.empty())
    cfg = gmf::load_config_file(args.config_path);
  for (const auto& kv : args.sets) gmf::apply_override(cfg, kv);
  if (args.seed_given) {
    cfg.master_seed = args.seed;
    cfg.master_seed_explicit = true;
  } else if (!cfg.master_seed_explicit) {
    if (const char* env = std::getenv("GMIX_SEED")) {
      cfg.master_seed = std::stoull(env);
      cfg.master_seed_explicit = true;
    }
  }
  if (!args.out_dir.empty()) cfg.output_dir = args.out_dir;
  fs::create_directories(cfg.output_dir);
  return cfg;
}

void write_manifest(const std::string& command, const CommonArgs& args,
                    const gmf::StudyConfig& cfg,
                    const std::vector<std::pair<std::string, std::string>>&
                        input_files,
                    const std::vector<std::string>& outputs) {
  json doc;
  doc["command"] = command;
  doc["config"] = json::parse(gmf::config_to_json(cfg));
  doc["master_seed"] = cfg.master_seed;
  json inputs = json::object();
  for (const auto& [label, path] : input_files) {
    json entry;
    entry["path"] = path;
    char hex[24];
    std::snprintf(hex, sizeof(hex), "%016llx",
                  static_cast<unsigned long long>(gmf::fnv1a64_file(path)));
    entry["fnv1a64"] = hex;
    inputs[label] = entry;
  }
  doc["inputs"] = inputs;
  doc["outputs"] = outputs;
  doc["threads"] = args.threads;
  std::ofstream out(fs::path(cfg.output_dir) /
                    ("manifest_" + command + ".json"));
  out << doc.dump(2) << "\n";
}

std::vector<gmf::TestFunction> phi_list(const gmf::StudyConfig& cfg,
                                        bool all_phi) {
  std::vector<gmf::TestFunction> phis;
  if (all_phi) {
    for (const auto& name : gmf::test_function_catalog())
      phis.push_back(gmf::make_test_function(name));
  } else {
    phis.push_back(gmf::make_test_function(cfg.phi));
  }
  return phis;
}

int run_simulate(const CommonArgs& args) {
  gmf::StudyConfig cfg = resolve_config(args);
  gmf::Model model = gmf::make_builtin_model(cfg.model);
  gmf::TimeGrid grid = gmf::study_grid(cfg);
  gmf::RngStream sig_rng(cfg.master_seed, gmf::kSignalStream);
  gmf::RngStream obs_rng(cfg.master_seed, gmf::kObservationStream);
  gmf::SignalPath signal = gmf::simulate_signal(model, grid, sig_rng);
  gmf::ObservationPath obs =
      gmf::simulate_observation(model, signal, obs_rng);
  const std::string sig_file =
      (fs::path(cfg.output_dir) / "signal.csv").string();
  const std::string obs_file =
      (fs::path(cfg.output_dir) / "observation.csv").string();
  gmf::write_signal_csv(sig_file, signal);
  gmf::write_observation_csv(obs_file, obs);
  std::vector<std::pair<std::string, std::string>> inputs;
  if (!args.config_path.empty()) inputs.push_back({"config", args.config_path});
  write_manifest("simulate", args, cfg, inputs, {sig_file, obs_file});
  std::cout << "simulate: wrote " << sig_file << " and " << obs_file << "\n";
  return 0;
}

int run_single_filter(const CommonArgs& args, const std::string& obs_path,
                      bool all_phi) {
  gmf::StudyConfig cfg = resolve_config(args);
  if (obs_path.empty())
    throw std::invalid_argument("filter needs --obs <observation.csv>");
  gmf::Model model = gmf::make_builtin_model(cfg.model);
  gmf::ObservationPath obs =
      gmf::read_observation_csv(obs_path, cfg.delta);
  gmf::FilterConfig fc = gmf::FilterConfig::from_epsilon(
      cfg.single_filter_n(), cfg.epsilon, cfg.beta, obs.grid);
  gmf::RunOptions options;
  options.mode = gmf::RecordMode::kCorrections;
  options.phis = phi_list(cfg, all_phi);
  gmf::RngStream part_rng(cfg.master_seed, gmf::kParticleStreamBase);
  gmf::FilterTrajectory traj =
      gmf::run_filter(fc, model, obs, options, part_rng);
  const std::string tag =
      gmf::study_tag(cfg.model, cfg.phi, cfg.epsilon);
  const std::string traj_file =
      (fs::path(cfg.output_dir) / ("trajectory_" + tag + ".csv")).string();
  gmf::write_trajectory_csv(traj_file, traj);
  std::vector<std::pair<std::string, std::string>> inputs = {
      {"observation", obs_path}};
  if (!args.config_path.empty()) inputs.push_back({"config", args.config_path});
  write_manifest("filter", args, cfg, inputs, {traj_file});
  std::cout << "filter: n=" << fc.n << " alpha=" << fc.alpha << " wrote "
            << traj_file << "\n";
  return 0;
}

int run_converge(const CommonArgs& args) {
  gmf::StudyConfig cfg = resolve_config(args);
  gmf::ConvergenceStudyConfig scfg =
      gmf::make_convergence_config(cfg, args.threads);
  gmf::ConvergenceReport report = gmf::run_convergence_study(scfg);
  const std::string tag = gmf::study_tag(cfg.model, cfg.phi, cfg.epsilon);
  const std::string csv_file =
      (fs::path(cfg.output_dir) / ("convergence_" + tag + ".csv")).string();
  const std::string json_file =
      (fs::path(cfg.output_dir) / ("convergence_" + tag + ".json")).string();
  gmf::write_convergence_csv(csv_file, report);
  gmf::write_convergence_json(json_file, report);
  std::vector<std::pair<std::string, std::string>> inputs;
  if (!args.config_path.empty()) inputs.push_back({"config", args.config_path});
  write_manifest("converge", args, cfg, inputs, {csv_file, json_file});
  std::cout << "converge: slope=" << report.slope << " (predicted "
            << report.predicted_slope << ", band [" << report.slope_min
            << ", " << report.slope_max << "]) "
            << (report.pass ? "pass" : "FAIL") << "\n";
  return report.pass ? 0 : 2;
}

int run_clt(const CommonArgs& args) {
  gmf::StudyConfig cfg = resolve_config(args);
  gmf::CltStudyConfig scfg = gmf::make_clt_config(cfg, args.threads);
  gmf::CltReport report = gmf::run_clt_study(scfg);
  const std::string tag = gmf::study_tag(cfg.model, cfg.phi, cfg.epsilon);
  const std::string csv_file =
      (fs::path(cfg.output_dir) / ("clt_" + tag + ".csv")).string();
  const std::string json_file =
      (fs::path(cfg.output_dir) / ("clt_" + tag + ".json")).string();
  gmf::write_clt_csv(csv_file, report);
  gmf::write_clt_json(json_file, report);
  std::vector<std::pair<std::string, std::string>> inputs;
  if (!args.config_path.empty()) inputs.push_back({"config", args.config_path});
  write_manifest("clt", args, cfg, inputs, {csv_file, json_file});
  std::cout << "clt: regime="
            << (report.diverging_regime ? "diverging" : "stabilizing")
            << " pass_var=" << report.pass_var
            << " pass_ks=" << report.pass_ks << " "
            << (report.pass ? "pass" : "FAIL") << "\n";
  return report.pass ? 0 : 2;
}

int run_residual(const CommonArgs& args) {
  gmf::StudyConfig cfg = resolve_config(args);
  gmf::Model model = gmf::make_builtin_model(cfg.model);
  gmf::TestFunction phi = gmf::make_test_function(cfg.phi);
  gmf::TestFunction gen = gmf::generator_compose(model, phi);
  gmf::TestFunction sens = gmf::sensor_product(model, phi);

  json doc;
  doc["model"] = cfg.model;
  doc["phi"] = cfg.phi;

  // exact-reference refinement: same Brownian path, dt 1e-2 -> 1e-4
  bool oracle_decreasing = true;
  json oracle_rows = json::array();
  if (model.linear()) {
    gmf::TimeGrid fine = gmf::TimeGrid::create(1e-4, 0.1, 1.0);
    gmf::RngStream sig_rng(cfg.master_seed, gmf::kSignalStream);
    gmf::RngStream obs_rng(cfg.master_seed, gmf::kObservationStream);
    gmf::SignalPath signal = gmf::simulate_signal(model, fine, sig_rng);
    gmf::ObservationPath obs_fine =
        gmf::simulate_observation(model, signal, obs_rng);
    double prev = 0.0;
    for (long factor : {100L, 10L, 1L}) {
      gmf::ObservationPath obs =
          factor == 1 ? obs_fine : gmf::coarsen_observation(obs_fine, factor);
      gmf::MomentPath mp = gmf::kalman_bucy(model, obs);
      const double res = gmf::zakai_residual_series(
          gmf::rho_series(mp, phi), gmf::rho_series(mp, gen),
          gmf::rho_series(mp, sens), obs);
      json row;
      row["dt"] = obs.grid.dt;
      row["residual"] = res;
      oracle_rows.push_back(row);
      if (factor != 100L && res >= prev) oracle_decreasing = false;
      prev = res;
    }
  }
  doc["oracle"] = oracle_rows;
  doc["oracle_decreasing"] = oracle_decreasing;

  // filter defect against n on one frozen observation path
  gmf::TimeGrid grid = gmf::study_grid(cfg);
  gmf::RngStream sig_rng(cfg.master_seed, gmf::kSignalStream);
  gmf::RngStream obs_rng(cfg.master_seed, gmf::kObservationStream);
  gmf::SignalPath signal = gmf::simulate_signal(model, grid, sig_rng);
  gmf::ObservationPath obs =
      gmf::simulate_observation(model, signal, obs_rng);
  gmf::RunOptions options;
  options.mode = gmf::RecordMode::kEverySubstep;
  options.phis = {phi, gen, sens};
  json filter_rows = json::array();
  std::vector<double> res_n(cfg.n_grid.size());
  gmf::parallel_for(0, static_cast<long>(cfg.n_grid.size()), args.threads,
                    [&](long i) {
                      gmf::FilterConfig fc = gmf::FilterConfig::from_epsilon(
                          cfg.n_grid[static_cast<std::size_t>(i)], cfg.epsilon,
                          cfg.beta, grid);
                      gmf::RngStream part(
                          cfg.master_seed,
                          gmf::kParticleStreamBase +
                              static_cast<std::uint64_t>(i));
                      gmf::FilterTrajectory traj =
                          gmf::run_filter(fc, model, obs, options, part);
                      res_n[static_cast<std::size_t>(i)] =
                          gmf::zakai_residual(traj, phi.name(), obs);
                    });
  for (std::size_t i = 0; i < cfg.n_grid.size(); ++i) {
    json row;
    row["n"] = cfg.n_grid[i];
    row["residual"] = res_n[i];
    filter_rows.push_back(row);
  }
  doc["filter"] = filter_rows;
  const bool filter_improved = res_n.back() < res_n.front();
  doc["filter_improved"] = filter_improved;
  const bool pass = oracle_decreasing && filter_improved;
  doc["pass"] = pass;

  const std::string tag = gmf::study_tag(cfg.model, cfg.phi, cfg.epsilon);
  const std::string json_file =
      (fs::path(cfg.output_dir) / ("residual_" + tag + ".json")).string();
  std::ofstream out(json_file);
  out << doc.dump(2) << "\n";
  std::vector<std::pair<std::string, std::string>> inputs;
  if (!args.config_path.empty()) inputs.push_back({"config", args.config_path});
  write_manifest("residual", args, cfg, inputs, {json_file});
  std::cout << "residual: oracle_decreasing=" << oracle_decreasing
            << " filter_improved=" << filter_improved << " "
            << (pass ? "pass" : "FAIL") << "\n";
  return pass ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gaussian mixture particle filter experiment harness"};
  app.require_subcommand(1);

  CommonArgs args;
  std::string obs_path;
  bool all_phi = false;

  CLI::App* sim = app.add_subcommand(
      "simulate", "write one signal/observation path pair");
  add_common_flags(sim, args);
  CLI::App* filt = app.add_subcommand(
      "filter", "run one mixture filter over an observation file");
  add_common_flags(filt, args);
  filt->add_option("--obs", obs_path, "observation CSV from `simulate`");
  filt->add_flag("--all-phi", all_phi, "record the whole function catalog");
  CLI::App* conv = app.add_subcommand(
      "converge", "L2 rate study: MSE vs n with a log-log slope fit");
  add_common_flags(conv, args);
  CLI::App* clt = app.add_subcommand(
      "clt", "rescaled-error distribution study on a frozen path");
  add_common_flags(clt, args);
  CLI::App* resid = app.add_subcommand(
      "residual", "Zakai defect diagnostics (reference and filter)");
  add_common_flags(resid, args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);  // prints help or the parse error
    return code == 0 ? 0 : 1;
  }

  try {
    if (sim->parsed()) return run_simulate(args);
    if (filt->parsed()) return run_single_filter(args, obs_path, all_phi);
    if (conv->parsed()) return run_converge(args);
    if (clt->parsed()) return run_clt(args);
    if (resid->parsed()) return run_residual(args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
