#pragma once

#include "otfs/grid.hpp"

namespace otfs {

/// Unitary DFT matrix, entry (j,k) = exp(-i 2 pi j k / n) / sqrt(n).
CMat make_dft(int n);

/// ISFFT: X_TF = F_M X_DD F_N^H.
CMat dd_to_tf(const GridConfig& grid, const CMat& x_dd);

/// Rectangular-pulse Heisenberg transform of a TF grid, s = vec(F_M^H X_TF).
CVec tf_to_time(const GridConfig& grid, const CMat& x_tf);

/// DD symbols to the time-domain frame, s = (F_N^H kron I_M) x_DD.
/// Identical to dd_to_tf followed by tf_to_time.
CVec dd_to_time(const DdFrame& frame);

/// Receive side: y_DD = (F_N kron I_M) r. Exact inverse of dd_to_time.
CVec time_to_dd(const CVec& r, const GridConfig& grid);

}  // namespace otfs
