#pragma once

#include <string>
#include <vector>

#include "otfs/config.hpp"

namespace otfs {

/// True channel and its NMSE-corrupted estimate for one frame.
struct FramePair {
  CMat truth;
  CMat estimate;
};

/// Training data stored as contiguous frame sequences; an example i is a
/// sliding window: tau estimated past frames plus the true current frame.
struct TrainingSet {
  GridConfig grid;
  int tau = 5;
  double nmse = 0.01;
  int p_count = 4;
  uint64_t seed = 0;
  std::vector<std::vector<FramePair>> sequences;

  struct ExampleRef {
    const std::vector<FramePair>* seq = nullptr;
    int t = 0;    // index of the target frame within the sequence
    int tau = 0;  // history length; frames t-tau .. t-1 are the window

    const CMat& truth() const { return (*seq)[t].truth; }
    const CMat& history(int i) const { return (*seq)[t - tau + i].estimate; }  // oldest first
  };

  int size() const;
  ExampleRef example(int i) const;
};

TrainingSet gen_dataset(const ExperimentConfig& cfg, uint64_t seed);

void save_dataset(const std::string& path, const TrainingSet& data);
TrainingSet load_dataset(const std::string& path);

}  // namespace otfs
