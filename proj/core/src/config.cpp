#include "gmf/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace gmf {

namespace {

using json = nlohmann::ordered_json;

std::uint64_t parse_seed(const json& v) {
  if (v.is_string()) return std::stoull(v.get<std::string>());
  return v.get<std::uint64_t>();
}

std::vector<int> parse_n_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.push_back(std::stoi(item));
  }
  if (out.empty()) throw std::invalid_argument("empty list");
  return out;
}

void set_key(StudyConfig& cfg, const std::string& key, const json& v) {
  if (key == "model")
    cfg.model = v.get<std::string>();
  else if (key == "phi")
    cfg.phi = v.get<std::string>();
  else if (key == "epsilon")
    cfg.epsilon = v.get<double>();
  else if (key == "beta")
    cfg.beta = v.get<double>();
  else if (key == "n_grid")
    cfg.n_grid = v.get<std::vector<int>>();
  else if (key == "replicas")
    cfg.replicas = v.get<int>();
  else if (key == "dt")
    cfg.dt = v.get<double>();
  else if (key == "delta")
    cfg.delta = v.get<double>();
  else if (key == "T")
    cfg.horizon = v.get<double>();
  else if (key == "master_seed") {
    cfg.master_seed = parse_seed(v);
    cfg.master_seed_explicit = true;
  } else if (key == "output_dir")
    cfg.output_dir = v.get<std::string>();
  else if (key == "n")
    cfg.n = v.get<int>();
  else if (key == "slope_min")
    cfg.slope_min = v.get<double>();
  else if (key == "slope_max")
    cfg.slope_max = v.get<double>();
  else if (key == "oracle_particles")
    cfg.oracle_particles = v.get<long>();
  else if (key == "oracle_batches")
    cfg.oracle_batches = v.get<int>();
  else if (key == "observation_seed")
    cfg.observation_seed = parse_seed(v);
  else
    throw std::invalid_argument("unknown config key: " + key);
}

}  // namespace

StudyConfig parse_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config is not valid JSON: ") +
                                e.what());
  }
  if (!doc.is_object())
    throw std::invalid_argument("config must be a JSON object");
  StudyConfig cfg;
  for (const auto& [key, value] : doc.items()) {
    try {
      set_key(cfg, key, value);
    } catch (const json::exception& e) {
      throw std::invalid_argument("invalid value for config key " + key +
                                  ": " + e.what());
    }
  }
  return cfg;
}

StudyConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

void apply_override(StudyConfig& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw std::invalid_argument("override must be key=value: " + assignment);
  const std::string key = assignment.substr(0, eq);
  const std::string value = assignment.substr(eq + 1);
  try {
    if (key == "model")
      cfg.model = value;
    else if (key == "phi")
      cfg.phi = value;
    else if (key == "epsilon")
      cfg.epsilon = std::stod(value);
    else if (key == "beta")
      cfg.beta = std::stod(value);
    else if (key == "n_grid")
      cfg.n_grid = parse_n_list(value);
    else if (key == "replicas")
      cfg.replicas = std::stoi(value);
    else if (key == "dt")
      cfg.dt = std::stod(value);
    else if (key == "delta")
      cfg.delta = std::stod(value);
    else if (key == "T")
      cfg.horizon = std::stod(value);
    else if (key == "master_seed") {
      cfg.master_seed = std::stoull(value);
      cfg.master_seed_explicit = true;
    } else if (key == "output_dir")
      cfg.output_dir = value;
    else if (key == "n")
      cfg.n = std::stoi(value);
    else if (key == "slope_min")
      cfg.slope_min = std::stod(value);
    else if (key == "slope_max")
      cfg.slope_max = std::stod(value);
    else if (key == "oracle_particles")
      cfg.oracle_particles = std::stol(value);
    else if (key == "oracle_batches")
      cfg.oracle_batches = std::stoi(value);
    else if (key == "observation_seed")
      cfg.observation_seed = std::stoull(value);
    else
      throw std::invalid_argument("unknown config key: " + key);
  } catch (const std::invalid_argument&) {
    throw;
  } catch (const std::exception&) {
    throw std::invalid_argument("invalid value for config key " + key + ": " +
                                value);
  }
}

TimeGrid study_grid(const StudyConfig& cfg) {
  return TimeGrid::create(cfg.dt, cfg.delta, cfg.horizon);
}

void validate_study(const StudyConfig& cfg) {
  if (cfg.n_grid.size() < 4)
    throw std::invalid_argument(
        "n_grid must have at least 4 strictly increasing entries");
  for (std::size_t i = 0; i < cfg.n_grid.size(); ++i) {
    if (cfg.n_grid[i] < 2)
      throw std::invalid_argument("n_grid entries must be >= 2");
    if (i > 0 && cfg.n_grid[i] <= cfg.n_grid[i - 1])
      throw std::invalid_argument("n_grid must be strictly increasing");
  }
  if (cfg.replicas < 50)
    throw std::invalid_argument("replicas must be >= 50");
}

std::string config_to_json(const StudyConfig& cfg) {
  json doc;
  doc["model"] = cfg.model;
  doc["phi"] = cfg.phi;
  doc["epsilon"] = cfg.epsilon;
  doc["beta"] = cfg.beta;
  doc["n_grid"] = cfg.n_grid;
  doc["replicas"] = cfg.replicas;
  doc["dt"] = cfg.dt;
  doc["delta"] = cfg.delta;
  doc["T"] = cfg.horizon;
  doc["master_seed"] = cfg.master_seed;
  doc["output_dir"] = cfg.output_dir;
  if (cfg.n) doc["n"] = *cfg.n;
  if (cfg.slope_min) doc["slope_min"] = *cfg.slope_min;
  if (cfg.slope_max) doc["slope_max"] = *cfg.slope_max;
  doc["oracle_particles"] = cfg.oracle_particles;
  doc["oracle_batches"] = cfg.oracle_batches;
  if (cfg.observation_seed) doc["observation_seed"] = *cfg.observation_seed;
  return doc.dump(2);
}

}  // namespace gmf
