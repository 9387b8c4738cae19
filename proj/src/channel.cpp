#include "otfs/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "otfs/transforms.hpp"

namespace otfs {

namespace {

int clamp_int(int v, int lo, int hi) { return std::min(std::max(v, lo), hi); }

// uniform real offset rounded to the integer grid
int draw_offset(Rng& rng, int lo, int hi) {
  return static_cast<int>(std::lround(rng.uniform(static_cast<double>(lo),
                                                  static_cast<double>(hi))));
}

}  // namespace

void EvolutionParams::validate() const {
  if (p_count < 1) throw ConfigError("channel: path count must be at least 1");
  if (rho < 0.0 || rho > 1.0) throw ConfigError("channel: rho must lie in [0, 1]");
  if (eps_min > eps_max) throw ConfigError("channel: delay offset bounds reversed");
  if (veps_min > veps_max) throw ConfigError("channel: Doppler offset bounds reversed");
  if (l_max < 0) throw ConfigError("channel: l_max must be nonnegative");
  if (k_max < 0) throw ConfigError("channel: k_max must be nonnegative");
}

BuildOperators BuildOperators::make(int mn) {
  if (mn < 1) throw DimensionError("BuildOperators: frame size must be positive");
  BuildOperators ops;
  ops.permutation = CMat::Zero(mn, mn);
  for (int i = 0; i < mn; ++i) ops.permutation((i + 1) % mn, i) = 1.0;
  ops.phase = CMat::Zero(mn, mn);
  for (int i = 0; i < mn; ++i) {
    const double ang = 2.0 * std::numbers::pi * i / mn;
    ops.phase(i, i) = cxd{std::cos(ang), std::sin(ang)};
  }
  return ops;
}

PathSet init_paths(const EvolutionParams& params, Rng& rng) {
  params.validate();
  PathSet set;
  set.paths.resize(params.p_count);
  const double var = 1.0 / params.p_count;
  for (auto& p : set.paths) {
    p.gain = rng.cgauss(var);
    p.delay_idx = rng.uniform_int(0, params.l_max);
    p.doppler_idx = rng.uniform_int(-params.k_max, params.k_max);
  }
  return set;
}

PathSet evolve(const PathSet& prev, const EvolutionParams& params, Rng& rng) {
  params.validate();
  PathSet next = prev;
  const double var = 1.0 / params.p_count;
  const double mix = std::sqrt(1.0 - params.rho * params.rho);
  for (auto& p : next.paths) {
    p.delay_idx = clamp_int(p.delay_idx + draw_offset(rng, params.eps_min, params.eps_max),
                            0, params.l_max);
    p.doppler_idx = clamp_int(p.doppler_idx + draw_offset(rng, params.veps_min, params.veps_max),
                              -params.k_max, params.k_max);
    p.gain = params.rho * p.gain + mix * rng.cgauss(var);
  }
  return next;
}

CMat build_time_channel(const PathSet& paths, const GridConfig& grid) {
  grid.validate();
  const int mn = grid.frame_size();
  CMat h = CMat::Zero(mn, mn);
  for (const auto& p : paths.paths) {
    if (p.delay_idx < 0 || p.delay_idx >= mn)
      throw InvalidPathError("build_time_channel: delay index outside [0, MN)");
    const int k = ((p.doppler_idx % mn) + mn) % mn;  // Delta^MN = I
    const double kl = -2.0 * std::numbers::pi *
                      static_cast<double>(p.doppler_idx) * p.delay_idx / mn;
    const cxd front = p.gain * cxd{std::cos(kl), std::sin(kl)};
    // (Delta^k Pi^l)(i, j) is nonzero only at j = (i - l) mod MN with value
    // exp(i 2 pi k i / MN)
    for (int i = 0; i < mn; ++i) {
      const double ang = 2.0 * std::numbers::pi * static_cast<double>(k) * i / mn;
      const int j = ((i - p.delay_idx) % mn + mn) % mn;
      h(i, j) += front * cxd{std::cos(ang), std::sin(ang)};
    }
  }
  return h;
}

DdChannel to_dd(const CMat& h_time, const GridConfig& grid) {
  grid.validate();
  const int mn = grid.frame_size();
  if (h_time.rows() != mn || h_time.cols() != mn)
    throw DimensionError("to_dd: channel must be MN x MN");
  const CMat u = kron(make_dft(grid.n), CMat::Identity(grid.m, grid.m));
  return DdChannel{grid, u * h_time * u.adjoint()};
}

DdChannel corrupt_estimate(const DdChannel& h, double nmse, Rng& rng) {
  if (nmse < 0.0) throw ConfigError("corrupt_estimate: nmse must be nonnegative");
  if (nmse == 0.0) return h;
  const int mn = h.grid.frame_size();
  const double var = nmse * h.matrix.squaredNorm() / (static_cast<double>(mn) * mn);
  DdChannel out{h.grid, h.matrix};
  for (int j = 0; j < mn; ++j)
    for (int i = 0; i < mn; ++i) out.matrix(i, j) += rng.cgauss(var);
  return out;
}

std::vector<ChannelFrame> channel_sequence(const EvolutionParams& params,
                                           const GridConfig& grid, int length,
                                           uint64_t seed) {
  if (length < 1) throw ConfigError("channel_sequence: length must be at least 1");
  Rng rng(seed);
  std::vector<ChannelFrame> frames;
  frames.reserve(length);
  PathSet paths = init_paths(params, rng);
  frames.push_back({paths, to_dd(build_time_channel(paths, grid), grid)});
  for (int t = 1; t < length; ++t) {
    paths = evolve(paths, params, rng);
    frames.push_back({paths, to_dd(build_time_channel(paths, grid), grid)});
  }
  return frames;
}

}  // namespace otfs
