#pragma once

#include <optional>
#include <string>
#include <vector>

#include "otfs/config.hpp"
#include "otfs/net.hpp"

namespace otfs {

/// One (scheme, SNR) point of an FER sweep.
struct SweepRow {
  std::string scheme;
  double snr_db = 0.0;
  double fer = 0.0;
  double ci95 = 0.0;
  long long n_frames = 0;
  uint64_t seed = 0;
};

/// FER vs SNR over fresh held-out channels; the same channel set is used by
/// every scheme at a given point. Throws ConfigError if a ddcl scheme is
/// requested without trained parameters.
std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg,
                                const NetworkParams* trained);

std::string sweep_csv(const std::vector<SweepRow>& rows);
void write_sweep_csv(const std::string& path, const std::vector<SweepRow>& rows);
std::vector<SweepRow> read_sweep_csv(const std::string& path);

}  // namespace otfs
