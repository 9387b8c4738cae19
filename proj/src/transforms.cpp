#include "otfs/transforms.hpp"

#include <cmath>
#include <numbers>

namespace otfs {

CMat make_dft(int n) {
  if (n < 1) throw DimensionError("make_dft: n must be at least 1");
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  CMat f(n, n);
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      // reduce j*k mod n before forming the angle: keeps entries exactly
      // periodic for large indices
      const long long jk = static_cast<long long>(j) * k % n;
      const double ang = -2.0 * std::numbers::pi * static_cast<double>(jk) / n;
      f(j, k) = scale * cxd{std::cos(ang), std::sin(ang)};
    }
  }
  return f;
}

CMat dd_to_tf(const GridConfig& grid, const CMat& x_dd) {
  if (x_dd.rows() != grid.m || x_dd.cols() != grid.n)
    throw DimensionError("dd_to_tf: grid must be M x N");
  const CMat fm = make_dft(grid.m);
  const CMat fn = make_dft(grid.n);
  return fm * x_dd * fn.adjoint();
}

CVec tf_to_time(const GridConfig& grid, const CMat& x_tf) {
  if (x_tf.rows() != grid.m || x_tf.cols() != grid.n)
    throw DimensionError("tf_to_time: grid must be M x N");
  const CMat fm = make_dft(grid.m);
  CMat s = fm.adjoint() * x_tf;
  return Eigen::Map<const CVec>(s.data(), s.size());
}

CVec dd_to_time(const DdFrame& frame) {
  // s = vec(X_DD F_N^H) == (F_N^H kron I_M) x_DD
  const CMat fn = make_dft(frame.grid.n);
  CMat s = frame.as_matrix() * fn.adjoint();
  return Eigen::Map<const CVec>(s.data(), s.size());
}

CVec time_to_dd(const CVec& r, const GridConfig& grid) {
  grid.validate();
  if (r.size() != grid.frame_size())
    throw DimensionError("time_to_dd: expected MN samples");
  const CMat fn = make_dft(grid.n);
  const Eigen::Map<const CMat> rm(r.data(), grid.m, grid.n);
  // (F_N kron I_M) r = vec(R F_N^T); F_N is symmetric
  CMat y = rm * fn;
  return Eigen::Map<const CVec>(y.data(), y.size());
}

}  // namespace otfs
