#include "otfs/constellation.hpp"

#include <cmath>

#include "otfs/errors.hpp"

namespace otfs {

namespace {

uint32_t gray(uint32_t v) { return v ^ (v >> 1); }

int int_sqrt(int v) {
  int r = static_cast<int>(std::lround(std::sqrt(static_cast<double>(v))));
  return r * r == v ? r : -1;
}

}  // namespace

int Constellation::bits_per_symbol() const {
  int b = 0;
  for (int v = order; v > 1; v >>= 1) ++b;
  return b;
}

Constellation make_constellation(int order) {
  if (order != 4 && order != 16 && order != 64)
    throw ModulationError("make_constellation: unsupported order " + std::to_string(order));
  const int side = int_sqrt(order);
  const int half_bits = [side] {
    int b = 0;
    for (int v = side; v > 1; v >>= 1) ++b;
    return b;
  }();

  // odd-integer lattice scaled to unit mean symbol energy
  const double scale = std::sqrt(3.0 / (2.0 * (order - 1)));

  Constellation c;
  c.order = order;
  c.points.resize(order);
  c.labels.resize(order);
  for (int i = 0; i < side; ++i) {
    const double re = scale * (2 * i - (side - 1));
    for (int j = 0; j < side; ++j) {
      const double im = scale * (2 * j - (side - 1));
      const int idx = i * side + j;
      c.points(idx) = cxd{re, im};
      c.labels[idx] = (gray(static_cast<uint32_t>(i)) << half_bits) |
                      gray(static_cast<uint32_t>(j));
    }
  }
  c.min_distance = 2.0 * scale;
  return c;
}

int detect_one(cxd y, const Constellation& c) {
  int best = 0;
  double best_d = std::norm(y - c.points(0));
  for (int i = 1; i < c.order; ++i) {
    const double d = std::norm(y - c.points(i));
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

IVec detect(const CVec& y, const Constellation& c) {
  IVec out(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) out(i) = detect_one(y(i), c);
  return out;
}

}  // namespace otfs
