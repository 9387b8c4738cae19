#include "otfs/link.hpp"

#include <cmath>
#include <numbers>

namespace otfs {

namespace {

void check_order(int order) {
  if (order != 4 && order != 16 && order != 64)
    throw ModulationError("qam constants: unsupported order " + std::to_string(order));
}

CMat precode_channel(const DdChannel& h, const Precoder& p) {
  if (h.matrix.cols() != p.matrix.rows())
    throw DimensionError("equalizer: channel and precoder dimensions disagree");
  return h.matrix * p.matrix;
}

}  // namespace

void Precoder::validate() const {
  const int k = streams();
  if (k < 1 || k > matrix.rows())
    throw DimensionError("precoder: need 1 <= K <= MN");
  const double used = matrix.squaredNorm();
  if (used > power_budget + 1e-9 * std::max(1.0, power_budget))
    throw ConfigError("precoder: Frobenius power exceeds the budget");
}

CVec precode(const Precoder& p, const CVec& d) {
  if (d.size() != p.matrix.cols())
    throw DimensionError("precode: symbol vector must have K entries");
  return p.matrix * d;
}

Equalizer mmse_equalizer(const DdChannel& h_hat, const Precoder& p, double sigma2) {
  if (sigma2 <= 0.0) throw ConfigError("mmse_equalizer: sigma2 must be positive");
  const CMat b = precode_channel(h_hat, p);
  CMat m = b.adjoint() * b;
  m.diagonal().array() += sigma2;
  Eigen::LLT<CMat> llt(m);
  if (llt.info() != Eigen::Success)
    throw NumericalError("mmse_equalizer: Cholesky factorization failed");
  return Equalizer{llt.solve(b.adjoint()), EqKind::mmse};
}

Equalizer zf_equalizer(const DdChannel& h_hat, const Precoder& p) {
  const CMat b = precode_channel(h_hat, p);
  Eigen::ColPivHouseholderQR<CMat> qr(b);
  if (qr.rank() < b.cols())
    throw SingularChannelError("zf_equalizer: H P is rank deficient");
  // least-squares solve of B X = I gives the Moore-Penrose left inverse
  return Equalizer{qr.solve(CMat::Identity(b.rows(), b.rows())), EqKind::zf};
}

CVec recover(const Equalizer& e, const CVec& y_dd) {
  if (y_dd.size() != e.matrix.cols())
    throw DimensionError("recover: received vector must have MN entries");
  return e.matrix * y_dd;
}

RVec sinr_per_symbol(const Equalizer& e, const DdChannel& h_true,
                     const Precoder& p, double sigma2) {
  if (sigma2 <= 0.0) throw ConfigError("sinr: sigma2 must be positive");
  const CMat g = e.matrix * precode_channel(h_true, p);
  const int k = static_cast<int>(g.rows());
  RVec sinr(k);
  for (int i = 0; i < k; ++i) {
    const double sig = std::norm(g(i, i));
    const double interf = g.row(i).squaredNorm() - sig;
    const double noise = sigma2 * e.matrix.row(i).squaredNorm();
    sinr(i) = sig / (interf + noise);
  }
  return sinr;
}

double qam_alpha(int order) {
  check_order(order);
  return 2.0 - 2.0 / std::sqrt(static_cast<double>(order));
}

double qam_beta(int order) {
  check_order(order);
  return 3.0 / (2.0 * (order - 1));
}

double ser_from_sinr(double sinr, int order) {
  const double v = qam_alpha(order) *
                   std::erfc(std::sqrt(qam_beta(order) * std::max(sinr, 0.0)));
  return std::min(v, 1.0);
}

RVec ser_theory(const RVec& sinr, const Constellation& c) {
  RVec out(sinr.size());
  for (Eigen::Index i = 0; i < sinr.size(); ++i)
    out(i) = ser_from_sinr(sinr(i), c.order);
  return out;
}

double fer_from_ser(const RVec& ser) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < ser.size(); ++i) {
    if (ser(i) >= 1.0) return 1.0;
    acc += std::log1p(-ser(i));
  }
  return -std::expm1(acc);
}

LinkReport link_report(const DdChannel& h_true, const DdChannel& h_hat,
                       const Precoder& p, double sigma2, const Constellation& c) {
  const Equalizer e = mmse_equalizer(h_hat, p, sigma2);
  LinkReport report;
  report.sinr = sinr_per_symbol(e, h_true, p, sigma2);
  report.ser = ser_theory(report.sinr, c);
  report.fer = fer_from_ser(report.ser);
  return report;
}

double fer_theory(const DdChannel& h, const Precoder& p, double sigma2,
                  const Constellation& c) {
  return link_report(h, h, p, sigma2, c).fer;
}

double fer_theory(const DdChannel& h, const DdChannel& h_hat, const Precoder& p,
                  double sigma2, const Constellation& c) {
  return link_report(h, h_hat, p, sigma2, c).fer;
}

CMat fer_theory_grad(const DdChannel& h, const Precoder& p, double sigma2,
                     const Constellation& c, double* fer_out) {
  if (sigma2 <= 0.0) throw ConfigError("fer_theory_grad: sigma2 must be positive");
  const CMat& ch = h.matrix;
  const CMat& pm = p.matrix;
  const int k = static_cast<int>(pm.cols());
  const double alpha = qam_alpha(c.order);
  const double beta = qam_beta(c.order);

  // forward, keeping every intermediate the backward pass needs
  const CMat b = precode_channel(h, p);  // MN x K
  CMat m = b.adjoint() * b;
  m.diagonal().array() += sigma2;
  Eigen::LLT<CMat> llt(m);
  if (llt.info() != Eigen::Success)
    throw NumericalError("fer_theory_grad: Cholesky factorization failed");
  const CMat minv = llt.solve(CMat::Identity(k, k));
  const CMat e = minv * b.adjoint();  // K x MN
  const CMat g = e * b;               // K x K

  RVec sig(k), denom(k), gamma(k), ser(k);
  for (int i = 0; i < k; ++i) {
    sig(i) = std::norm(g(i, i));
    const double interf = g.row(i).squaredNorm() - sig(i);
    denom(i) = interf + sigma2 * e.row(i).squaredNorm();
    gamma(i) = sig(i) / denom(i);
    ser(i) = std::min(alpha * std::erfc(std::sqrt(beta * gamma(i))), 1.0);
  }

  // prefix/suffix products give prod_{j != i} (1 - ser_j) without division
  RVec pre(k + 1), suf(k + 1);
  pre(0) = 1.0;
  for (int i = 0; i < k; ++i) pre(i + 1) = pre(i) * (1.0 - ser(i));
  suf(k) = 1.0;
  for (int i = k - 1; i >= 0; --i) suf(i) = suf(i + 1) * (1.0 - ser(i));
  if (fer_out) *fer_out = 1.0 - pre(k);

  // cogradients, convention dL/dRe + i dL/dIm; dL = Re tr(Xdot^H dX)
  CMat gdot = CMat::Zero(k, k);
  CMat edot = CMat::Zero(k, static_cast<int>(e.cols()));
  for (int i = 0; i < k; ++i) {
    const double w_ser = pre(i) * suf(i + 1);
    double dser_dgamma = 0.0;
    if (ser(i) < 1.0 && gamma(i) > 0.0) {
      dser_dgamma = -alpha * std::sqrt(beta / (std::numbers::pi * gamma(i))) *
                    std::exp(-beta * gamma(i));
    }
    const double w_gamma = w_ser * dser_dgamma;
    if (w_gamma == 0.0) continue;
    const double w_sig = w_gamma / denom(i);
    const double w_den = -w_gamma * gamma(i) / denom(i);
    gdot.row(i) = 2.0 * w_den * g.row(i);
    gdot(i, i) = 2.0 * w_sig * g(i, i);
    edot.row(i) = 2.0 * w_den * sigma2 * e.row(i);
  }

  // G = E B with E = M^{-1} B^H and M = sigma^2 I + B^H B
  CMat bdot = e.adjoint() * gdot;
  edot += gdot * b.adjoint();
  const CMat minv_dot = edot * b;
  const CMat mdot = -minv * minv_dot * minv;
  bdot += edot.adjoint() * minv;
  bdot += b * (mdot + mdot.adjoint());
  return ch.adjoint() * bdot;
}

McResult monte_carlo_fer_with(const Equalizer& e, const DdChannel& h_true,
                              const Precoder& p, double sigma2,
                              const Constellation& c, long long n_frames,
                              Rng& rng) {
  if (n_frames < 1) throw ConfigError("monte_carlo_fer: need at least one frame");
  if (sigma2 < 0.0) throw ConfigError("monte_carlo_fer: negative noise variance");
  const CMat f = precode_channel(h_true, p);  // MN x K
  const int mn = static_cast<int>(f.rows());
  const int k = static_cast<int>(f.cols());
  const long long chunk = 512;

  Eigen::MatrixXi idx(k, chunk);
  CMat d(k, chunk), y(mn, chunk);
  long long errors = 0;
  for (long long done = 0; done < n_frames;) {
    const long long b = std::min(chunk, n_frames - done);
    for (long long col = 0; col < b; ++col)
      for (int row = 0; row < k; ++row) {
        idx(row, col) = rng.uniform_int(0, c.order - 1);
        d(row, col) = c.points(idx(row, col));
      }
    y.leftCols(b).noalias() = f * d.leftCols(b);
    if (sigma2 > 0.0)
      for (long long col = 0; col < b; ++col)
        for (int row = 0; row < mn; ++row) y(row, col) += rng.cgauss(sigma2);
    const CMat dh = e.matrix * y.leftCols(b);
    for (long long col = 0; col < b; ++col) {
      for (int row = 0; row < k; ++row) {
        if (detect_one(dh(row, col), c) != idx(row, col)) {
          ++errors;
          break;
        }
      }
    }
    done += b;
  }

  McResult r;
  r.n_frames = n_frames;
  r.n_errors = errors;
  r.fer = static_cast<double>(errors) / static_cast<double>(n_frames);
  if (errors == 0)
    r.ci95 = 3.0 / static_cast<double>(n_frames);  // rule of three
  else
    r.ci95 = 1.96 * std::sqrt(r.fer * (1.0 - r.fer) / static_cast<double>(n_frames));
  return r;
}

McResult monte_carlo_fer(const DdChannel& h_true, const DdChannel& h_hat,
                         const Precoder& p, double sigma2,
                         const Constellation& c, long long n_frames, Rng& rng) {
  const Equalizer e = mmse_equalizer(h_hat, p, sigma2);
  return monte_carlo_fer_with(e, h_true, p, sigma2, c, n_frames, rng);
}

}  // namespace otfs
