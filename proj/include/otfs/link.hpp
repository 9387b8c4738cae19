#pragma once

#include "otfs/channel.hpp"
#include "otfs/constellation.hpp"

namespace otfs {

/// Transmit precoder, MN x K with Frobenius power budget P0.
struct Precoder {
  CMat matrix;
  double power_budget = 0.0;

  int streams() const { return static_cast<int>(matrix.cols()); }
  void validate() const;
};

enum class EqKind { mmse, zf };

struct Equalizer {
  CMat matrix;  // K x MN
  EqKind kind = EqKind::mmse;
};

/// Per-stream SINR/SER and the frame error rate they compose to.
struct LinkReport {
  RVec sinr;
  RVec ser;
  double fer = 0.0;
};

CVec precode(const Precoder& p, const CVec& d);

/// E = (sigma^2 I_K + P^H H^H H P)^{-1} P^H H^H, built from the estimate.
Equalizer mmse_equalizer(const DdChannel& h_hat, const Precoder& p, double sigma2);

/// Left inverse of H P; throws SingularChannelError when rank deficient.
Equalizer zf_equalizer(const DdChannel& h_hat, const Precoder& p);

CVec recover(const Equalizer& e, const CVec& y_dd);

/// Per-stream SINR of G = E H P with the true channel H:
/// |G_kk|^2 / (sum_{j!=k} |G_kj|^2 + sigma^2 ||E_k||^2).
RVec sinr_per_symbol(const Equalizer& e, const DdChannel& h_true,
                     const Precoder& p, double sigma2);

// Gray-coded square-QAM SER constants: SER ~= alpha erfc(sqrt(beta SINR)).
double qam_alpha(int order);
double qam_beta(int order);

double ser_from_sinr(double sinr, int order);
RVec ser_theory(const RVec& sinr, const Constellation& c);

/// 1 - prod_k (1 - ser_k), evaluated in log1p form.
double fer_from_ser(const RVec& ser);

LinkReport link_report(const DdChannel& h_true, const DdChannel& h_hat,
                       const Precoder& p, double sigma2, const Constellation& c);

/// Closed-form FER with the MMSE equalizer built from the true channel.
double fer_theory(const DdChannel& h, const Precoder& p, double sigma2,
                  const Constellation& c);
/// Same, with the equalizer built from an explicit estimate.
double fer_theory(const DdChannel& h, const DdChannel& h_hat, const Precoder& p,
                  double sigma2, const Constellation& c);

/// d(fer)/dP as a complex cogradient (dL/dRe + i dL/dIm), equalizer built
/// from the true channel. Optionally returns the FER value.
CMat fer_theory_grad(const DdChannel& h, const Precoder& p, double sigma2,
                     const Constellation& c, double* fer_out = nullptr);

struct McResult {
  double fer = 0.0;
  double ci95 = 0.0;  // binomial 95% half-width
  long long n_frames = 0;
  long long n_errors = 0;
};

/// Simulated FER: i.i.d. uniform symbols, y = H P d + w, recovery with the
/// given equalizer, hard detection; a frame errs if any stream errs.
McResult monte_carlo_fer_with(const Equalizer& e, const DdChannel& h_true,
                              const Precoder& p, double sigma2,
                              const Constellation& c, long long n_frames,
                              Rng& rng);

/// MMSE equalization from the estimate h_hat.
McResult monte_carlo_fer(const DdChannel& h_true, const DdChannel& h_hat,
                         const Precoder& p, double sigma2,
                         const Constellation& c, long long n_frames, Rng& rng);

}  // namespace otfs
