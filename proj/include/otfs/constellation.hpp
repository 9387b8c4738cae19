#pragma once

#include <cstdint>
#include <vector>

#include "otfs/linalg.hpp"

namespace otfs {

/// Energy-normalized square QAM constellation with per-axis Gray labels.
struct Constellation {
  int order = 0;
  CVec points;                   // mean |point|^2 == 1
  std::vector<uint32_t> labels;  // Gray bit label of each point
  double min_distance = 0.0;

  int bits_per_symbol() const;
};

/// Supported orders: 4, 16, 64.
Constellation make_constellation(int order);

/// Nearest constellation point (Euclidean); ties resolve to the lowest index.
int detect_one(cxd y, const Constellation& c);
IVec detect(const CVec& y, const Constellation& c);

}  // namespace otfs
