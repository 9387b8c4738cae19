#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "otfs/channel.hpp"

namespace otfs {

/// Everything a run needs, parsed from a `key = value` config file.
/// Schema is documented in the README; unknown keys are rejected.
struct ExperimentConfig {
  GridConfig grid;
  EvolutionParams chan;

  int k_streams = 32;
  double p0 = -1.0;  // < 0 means "equal to k_streams"
  int constellation_order = 4;
  double nmse = 0.01;
  int tau = 5;

  std::vector<double> snr_grid_db{5.0, 10.0, 15.0, 20.0};
  std::vector<std::string> schemes{"perfect_icsi", "ddcl", "ddcl_theory",
                                   "mmse_baseline", "zf_baseline"};

  // Monte Carlo policy: accumulate rounds of mc_round_frames per channel
  // until mc_target_errors pooled errors or the per-point cap.
  int eval_channels = 100;
  int mc_round_frames = 200;
  int mc_target_errors = 12;
  long long mc_max_frames = 1'000'000;

  // training
  double train_snr_db = 15.0;
  double lr = 1e-3;
  int batch_size = 64;
  int iters = 2000;
  int patience = 20;
  int eval_every = 25;
  double val_fraction = 0.1;

  // dataset generation
  int dataset_examples = 6000;
  int dataset_seq_len = 55;

  // perfect-ICSI lower bound optimizer
  int icsi_iters = 200;
  double icsi_lr = 0.02;

  uint64_t seed = 1;

  double p0_effective() const { return p0 < 0.0 ? static_cast<double>(k_streams) : p0; }
  double train_sigma2() const;

  void validate() const;
};

double snr_db_to_sigma2(double snr_db);

ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);

}  // namespace otfs
