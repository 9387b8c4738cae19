#pragma once

#include "otfs/link.hpp"
#include "otfs/sweep.hpp"

namespace otfs {

/// No-precoder reference: P = sqrt(P0/MN) I, equalizer (MMSE or ZF) built
/// from the true channel.
SweepRow baseline_no_precoder_fer(const DdChannel& h, double sigma2,
                                  const Constellation& c, EqKind kind,
                                  long long n_frames, Rng& rng);

/// Lower-bound scheme: direct minimization of the closed-form FER over the
/// Frobenius sphere ||P||_F^2 = p0 (Adam with per-step renormalization,
/// deterministic multi-start, best iterate kept).
Precoder perfect_icsi_precoder(const DdChannel& h, double sigma2,
                               const Constellation& c, double p0, int iters,
                               double lr = 0.02, double* fer_out = nullptr);

}  // namespace otfs
