#include "otfs/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace otfs {

double snr_db_to_sigma2(double snr_db) { return std::pow(10.0, -snr_db / 10.0); }

double ExperimentConfig::train_sigma2() const { return snr_db_to_sigma2(train_snr_db); }

void ExperimentConfig::validate() const {
  grid.validate();
  chan.validate();
  if (k_streams < 1 || k_streams > grid.frame_size())
    throw ConfigError("config: k_streams must lie in [1, MN]");
  if (p0_effective() <= 0.0) throw ConfigError("config: p0 must be positive");
  if (constellation_order != 4 && constellation_order != 16 && constellation_order != 64)
    throw ConfigError("config: constellation must be 4, 16 or 64");
  if (nmse < 0.0) throw ConfigError("config: nmse must be nonnegative");
  if (tau < 1) throw ConfigError("config: tau must be at least 1");
  if (snr_grid_db.empty()) throw ConfigError("config: snr_grid_db must not be empty");
  if (schemes.empty()) throw ConfigError("config: schemes must not be empty");
  for (const auto& s : schemes) {
    if (s != "ddcl" && s != "ddcl_theory" && s != "mmse_baseline" &&
        s != "zf_baseline" && s != "perfect_icsi")
      throw ConfigError("config: unknown scheme '" + s + "'");
  }
  if (eval_channels < 1) throw ConfigError("config: eval_channels must be positive");
  if (mc_round_frames < 1 || mc_target_errors < 1 || mc_max_frames < 1)
    throw ConfigError("config: Monte Carlo policy values must be positive");
  if (lr < 0.0) throw ConfigError("config: lr must be nonnegative");
  if (batch_size < 1 || iters < 0 || patience < 1 || eval_every < 1)
    throw ConfigError("config: bad training hyperparameters");
  if (val_fraction < 0.0 || val_fraction >= 1.0)
    throw ConfigError("config: val_fraction must lie in [0, 1)");
  if (dataset_examples < 1 || dataset_seq_len <= tau)
    throw ConfigError("config: dataset_seq_len must exceed tau");
  if (icsi_iters < 1 || icsi_lr <= 0.0)
    throw ConfigError("config: bad perfect-ICSI optimizer settings");
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("config: bad numeric value for '" + key + "': " + v);
  }
}

long long to_int(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    const long long i = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return i;
  } catch (const std::exception&) {
    throw ConfigError("config: bad integer value for '" + key + "': " + v);
  }
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig cfg;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config: line " + std::to_string(lineno) + " is not 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty() || val.empty())
      throw ConfigError("config: empty key or value at line " + std::to_string(lineno));

    if (key == "m") cfg.grid.m = static_cast<int>(to_int(key, val));
    else if (key == "n") cfg.grid.n = static_cast<int>(to_int(key, val));
    else if (key == "carrier_hz") cfg.grid.carrier_hz = to_double(key, val);
    else if (key == "delta_f_hz") cfg.grid.delta_f_hz = to_double(key, val);
    else if (key == "paths") cfg.chan.p_count = static_cast<int>(to_int(key, val));
    else if (key == "l_max") cfg.chan.l_max = static_cast<int>(to_int(key, val));
    else if (key == "k_max") cfg.chan.k_max = static_cast<int>(to_int(key, val));
    else if (key == "rho") cfg.chan.rho = to_double(key, val);
    else if (key == "eps_min") cfg.chan.eps_min = static_cast<int>(to_int(key, val));
    else if (key == "eps_max") cfg.chan.eps_max = static_cast<int>(to_int(key, val));
    else if (key == "veps_min") cfg.chan.veps_min = static_cast<int>(to_int(key, val));
    else if (key == "veps_max") cfg.chan.veps_max = static_cast<int>(to_int(key, val));
    else if (key == "k_streams") cfg.k_streams = static_cast<int>(to_int(key, val));
    else if (key == "p0") cfg.p0 = to_double(key, val);
    else if (key == "constellation") cfg.constellation_order = static_cast<int>(to_int(key, val));
    else if (key == "nmse") cfg.nmse = to_double(key, val);
    else if (key == "tau") cfg.tau = static_cast<int>(to_int(key, val));
    else if (key == "snr_grid_db") {
      cfg.snr_grid_db.clear();
      for (const auto& item : split_list(val)) cfg.snr_grid_db.push_back(to_double(key, item));
    } else if (key == "schemes") cfg.schemes = split_list(val);
    else if (key == "eval_channels") cfg.eval_channels = static_cast<int>(to_int(key, val));
    else if (key == "mc_round_frames") cfg.mc_round_frames = static_cast<int>(to_int(key, val));
    else if (key == "mc_target_errors") cfg.mc_target_errors = static_cast<int>(to_int(key, val));
    else if (key == "mc_max_frames") cfg.mc_max_frames = to_int(key, val);
    else if (key == "train_snr_db") cfg.train_snr_db = to_double(key, val);
    else if (key == "lr") cfg.lr = to_double(key, val);
    else if (key == "batch_size") cfg.batch_size = static_cast<int>(to_int(key, val));
    else if (key == "iters") cfg.iters = static_cast<int>(to_int(key, val));
    else if (key == "patience") cfg.patience = static_cast<int>(to_int(key, val));
    else if (key == "eval_every") cfg.eval_every = static_cast<int>(to_int(key, val));
    else if (key == "val_fraction") cfg.val_fraction = to_double(key, val);
    else if (key == "dataset_examples") cfg.dataset_examples = static_cast<int>(to_int(key, val));
    else if (key == "dataset_seq_len") cfg.dataset_seq_len = static_cast<int>(to_int(key, val));
    else if (key == "icsi_iters") cfg.icsi_iters = static_cast<int>(to_int(key, val));
    else if (key == "icsi_lr") cfg.icsi_lr = to_double(key, val);
    else if (key == "seed") cfg.seed = static_cast<uint64_t>(to_int(key, val));
    else throw ConfigError("config: unknown key '" + key + "'");
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("config: cannot open " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config_text(ss.str());
}

}  // namespace otfs
