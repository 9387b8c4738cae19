#pragma once

#include <vector>

#include "otfs/grid.hpp"
#include "otfs/rng.hpp"

namespace otfs {

struct Path {
  cxd gain;
  int delay_idx = 0;
  int doppler_idx = 0;
};

/// The P resolvable paths of one frame.
struct PathSet {
  std::vector<Path> paths;
  int count() const { return static_cast<int>(paths.size()); }
};

/// Frame-to-frame evolution: first-order Gauss-Markov gains (correlation
/// rho, innovation CN(0, 1/P)) and integer random-walk delay/Doppler indices
/// with uniform offsets, clamped to [0, l_max] and [-k_max, k_max].
struct EvolutionParams {
  double rho = 0.6;
  int eps_min = -2, eps_max = 2;    // delay index offset range
  int veps_min = -2, veps_max = 2;  // Doppler index offset range
  int l_max = 5;
  int k_max = 2;
  int p_count = 4;

  void validate() const;
};

/// DD-domain channel matrix H_DD (MN x MN) for one frame.
struct DdChannel {
  GridConfig grid;
  CMat matrix;
};

/// The forward cyclic shift Pi and the diagonal phase ramp Delta that
/// generate the time-domain channel; both depend only on MN.
struct BuildOperators {
  CMat permutation;
  CMat phase;
  static BuildOperators make(int mn);
};

PathSet init_paths(const EvolutionParams& params, Rng& rng);
PathSet evolve(const PathSet& prev, const EvolutionParams& params, Rng& rng);

/// H_T = sum_p h_p exp(-i 2 pi k_p l_p / MN) Delta^{k_p} Pi^{l_p}.
/// Negative Doppler powers use the exponent mod MN (Delta^MN = I).
CMat build_time_channel(const PathSet& paths, const GridConfig& grid);

/// H_DD = (F_N kron I_M) H_T (F_N^H kron I_M).
DdChannel to_dd(const CMat& h_time, const GridConfig& grid);

/// Additive white complex-gaussian estimate error, scaled so that
/// E||e||_F^2 / ||H||_F^2 equals nmse exactly in expectation.
DdChannel corrupt_estimate(const DdChannel& h, double nmse, Rng& rng);

struct ChannelFrame {
  PathSet paths;
  DdChannel channel;
};

/// Frame-sequenced channel: init_paths at t=0, then evolve each frame.
/// Deterministic for a fixed seed.
std::vector<ChannelFrame> channel_sequence(const EvolutionParams& params,
                                           const GridConfig& grid, int length,
                                           uint64_t seed);

}  // namespace otfs
