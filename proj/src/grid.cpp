#include "otfs/grid.hpp"

#include <utility>

namespace otfs {

void GridConfig::validate() const {
  if (m < 1 || n < 1) throw DimensionError("grid: M and N must be at least 1");
  if (delta_f_hz <= 0.0) throw ConfigError("grid: subcarrier spacing must be positive");
  if (carrier_hz <= 0.0) throw ConfigError("grid: carrier frequency must be positive");
}

DdFrame::DdFrame(GridConfig g, CVec s) : grid(g), symbols(std::move(s)) {
  grid.validate();
  if (symbols.size() != grid.frame_size())
    throw DimensionError("DdFrame: expected MN symbols");
}

CMat DdFrame::as_matrix() const {
  return Eigen::Map<const CMat>(symbols.data(), grid.m, grid.n);
}

DdFrame DdFrame::from_matrix(const GridConfig& g, const CMat& x) {
  if (x.rows() != g.m || x.cols() != g.n)
    throw DimensionError("DdFrame: matrix must be M x N");
  CVec v = Eigen::Map<const CVec>(x.data(), x.size());
  return DdFrame(g, std::move(v));
}

}  // namespace otfs
