#pragma once

#include "otfs/errors.hpp"
#include "otfs/linalg.hpp"

namespace otfs {

/// OTFS grid geometry: M subcarriers by N time slots, subcarrier spacing
/// delta_f (the slot duration is 1/delta_f). Fixes every matrix size in the
/// chain through the frame dimension MN.
struct GridConfig {
  int m = 8;
  int n = 4;
  double carrier_hz = 4.0e9;
  double delta_f_hz = 15.0e3;

  int frame_size() const { return m * n; }
  double slot_duration_s() const { return 1.0 / delta_f_hz; }

  void validate() const;
  bool operator==(const GridConfig&) const = default;
};

// One frame of DD-domain symbols. The length-MN vector and the M x N matrix
// views are related by column-major stacking; the round trip is exact.
struct DdFrame {
  GridConfig grid;
  CVec symbols;

  DdFrame(GridConfig g, CVec s);
  CMat as_matrix() const;
  static DdFrame from_matrix(const GridConfig& g, const CMat& x);
};

}  // namespace otfs
