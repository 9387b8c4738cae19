#include "otfs/net.hpp"

#include <cmath>

namespace otfs {

void NetConfig::validate() const {
  GridConfig{m, n, 1.0, 1.0}.validate();
  if (k < 1 || k > mn()) throw DimensionError("net: need 1 <= K <= MN");
  if (tau < 1) throw ConfigError("net: tau must be at least 1");
  if (p0 <= 0.0) throw ConfigError("net: power budget must be positive");
  if (conv_filters < 1 || lstm_hidden < 1)
    throw ConfigError("net: layer widths must be positive");
  if (conv_kernel != 3) throw ConfigError("net: only 3x3 conv kernels are supported");
}

ParamLayout ParamLayout::make(const NetConfig& cfg) {
  cfg.validate();
  const int h = cfg.lstm_hidden;
  ParamLayout l;
  int off = 0;
  l.conv_w = off;
  off += cfg.conv_filters * cfg.in_channels() * cfg.conv_kernel * cfg.conv_kernel;
  l.conv_b = off;
  off += cfg.conv_filters;
  l.l1_w = off;
  off += 4 * h * cfg.flat_size();
  l.l1_u = off;
  off += 4 * h * h;
  l.l1_b = off;
  off += 4 * h;
  l.l2_w = off;
  off += 4 * h * h;
  l.l2_u = off;
  off += 4 * h * h;
  l.l2_b = off;
  off += 4 * h;
  l.fc_w = off;
  off += cfg.fc_out() * h;
  l.fc_b = off;
  off += cfg.fc_out();
  l.total = off;
  return l;
}

namespace {

using ConstMap = Eigen::Map<const RMat>;
using MutMap = Eigen::Map<RMat>;
using ConstVecMap = Eigen::Map<const RVec>;
using MutVecMap = Eigen::Map<RVec>;

// read-only weight views over the flat parameter vector
struct Views {
  const NetConfig& cfg;
  ParamLayout lay;
  const double* t;

  Views(const NetworkParams& p) : cfg(p.cfg), lay(ParamLayout::make(p.cfg)), t(p.theta.data()) {
    if (p.theta.size() != lay.total)
      throw DimensionError("net: parameter vector size does not match the architecture");
  }

  double conv_w(int f, int c, int a, int b) const {
    const int kk = cfg.conv_kernel;
    return t[lay.conv_w + ((f * cfg.in_channels() + c) * kk + a) * kk + b];
  }
  double conv_b(int f) const { return t[lay.conv_b + f]; }
  ConstMap l1_w() const { return {t + lay.l1_w, 4 * cfg.lstm_hidden, cfg.flat_size()}; }
  ConstMap l1_u() const { return {t + lay.l1_u, 4 * cfg.lstm_hidden, cfg.lstm_hidden}; }
  ConstVecMap l1_b() const { return {t + lay.l1_b, 4 * cfg.lstm_hidden}; }
  ConstMap l2_w() const { return {t + lay.l2_w, 4 * cfg.lstm_hidden, cfg.lstm_hidden}; }
  ConstMap l2_u() const { return {t + lay.l2_u, 4 * cfg.lstm_hidden, cfg.lstm_hidden}; }
  ConstVecMap l2_b() const { return {t + lay.l2_b, 4 * cfg.lstm_hidden}; }
  ConstMap fc_w() const { return {t + lay.fc_w, cfg.fc_out(), cfg.lstm_hidden}; }
  ConstVecMap fc_b() const { return {t + lay.fc_b, cfg.fc_out()}; }
};

// mutable views for gradient accumulation
struct GradViews {
  const NetConfig& cfg;
  ParamLayout lay;
  double* t;

  GradViews(const NetConfig& c, RVec& grad) : cfg(c), lay(ParamLayout::make(c)), t(grad.data()) {}

  double& conv_w(int f, int c, int a, int b) {
    const int kk = cfg.conv_kernel;
    return t[lay.conv_w + ((f * cfg.in_channels() + c) * kk + a) * kk + b];
  }
  double& conv_b(int f) { return t[lay.conv_b + f]; }
  MutMap l1_w() { return {t + lay.l1_w, 4 * cfg.lstm_hidden, cfg.flat_size()}; }
  MutMap l1_u() { return {t + lay.l1_u, 4 * cfg.lstm_hidden, cfg.lstm_hidden}; }
  MutVecMap l1_b() { return {t + lay.l1_b, 4 * cfg.lstm_hidden}; }
  MutMap l2_w() { return {t + lay.l2_w, 4 * cfg.lstm_hidden, cfg.lstm_hidden}; }
  MutMap l2_u() { return {t + lay.l2_u, 4 * cfg.lstm_hidden, cfg.lstm_hidden}; }
  MutVecMap l2_b() { return {t + lay.l2_b, 4 * cfg.lstm_hidden}; }
  MutMap fc_w() { return {t + lay.fc_w, cfg.fc_out(), cfg.lstm_hidden}; }
  MutVecMap fc_b() { return {t + lay.fc_b, cfg.fc_out()}; }
};

RVec sigmoid(const RVec& z) { return (1.0 / (1.0 + (-z.array()).exp())).matrix(); }

struct LstmStep {
  RVec i, f, g, o, c, tanh_c, h;
};

struct LstmTrace {
  std::vector<LstmStep> steps;
};

LstmStep lstm_step(const ConstMap& w, const ConstMap& u, const ConstVecMap& b,
                   const RVec& x, const RVec& h_prev, const RVec& c_prev) {
  const int hid = static_cast<int>(h_prev.size());
  RVec z = w * x + b;
  z.noalias() += u * h_prev;
  LstmStep s;
  s.i = sigmoid(z.segment(0, hid));
  s.f = sigmoid(z.segment(hid, hid));
  s.g = z.segment(2 * hid, hid).array().tanh().matrix();
  s.o = sigmoid(z.segment(3 * hid, hid));
  s.c = (s.f.array() * c_prev.array() + s.i.array() * s.g.array()).matrix();
  s.tanh_c = s.c.array().tanh().matrix();
  s.h = (s.o.array() * s.tanh_c.array()).matrix();
  return s;
}

struct ConvTrace {
  std::vector<RMat> relu;               // per filter
  std::vector<Eigen::MatrixXi> arg_r;   // pooled argmax coordinates
  std::vector<Eigen::MatrixXi> arg_c;
  RVec flat;
};

// conv (ReLU, same padding) -> max pool -> flatten, for one time step
ConvTrace conv_forward(const Views& v, const RMat& re, const RMat& im) {
  const NetConfig& cfg = v.cfg;
  const int mn = cfg.mn();
  const int pr = cfg.pooled_rows();
  const int pc = cfg.pooled_cols();
  ConvTrace tr;
  tr.flat.resize(cfg.flat_size());
  const RMat* chans[2] = {&re, &im};
  for (int f = 0; f < cfg.conv_filters; ++f) {
    RMat act(mn, mn);
    for (int i = 0; i < mn; ++i) {
      for (int j = 0; j < mn; ++j) {
        double acc = v.conv_b(f);
        for (int c = 0; c < 2; ++c) {
          const RMat& x = *chans[c];
          for (int a = 0; a < 3; ++a) {
            const int r = i + a - 1;
            if (r < 0 || r >= mn) continue;
            for (int b = 0; b < 3; ++b) {
              const int cc = j + b - 1;
              if (cc < 0 || cc >= mn) continue;
              acc += v.conv_w(f, c, a, b) * x(r, cc);
            }
          }
        }
        act(i, j) = acc > 0.0 ? acc : 0.0;
      }
    }
    Eigen::MatrixXi ar(pr, pc), ac(pr, pc);
    for (int i = 0; i < pr; ++i) {
      for (int j = 0; j < pc; ++j) {
        int best_r = 2 * i, best_c = j;
        double best = act(best_r, best_c);
        for (int dr = 0; dr < 2; ++dr) {
          const int r = 2 * i + dr;
          if (r >= mn) continue;
          for (int dc = 0; dc < 2; ++dc) {
            const int col = j + dc;
            if (col >= mn) continue;
            if (act(r, col) > best) {
              best = act(r, col);
              best_r = r;
              best_c = col;
            }
          }
        }
        ar(i, j) = best_r;
        ac(i, j) = best_c;
        tr.flat((f * pr + i) * pc + j) = best;
      }
    }
    tr.relu.push_back(std::move(act));
    tr.arg_r.push_back(std::move(ar));
    tr.arg_c.push_back(std::move(ac));
  }
  return tr;
}

struct ForwardTrace {
  std::vector<ConvTrace> conv;  // per step
  LstmTrace l1, l2;
  RVec fc_raw;       // FC output before normalization
  double raw_norm = 0.0;
  CMat precoder;
};

void check_input(const InputTensor& x, const NetConfig& cfg) {
  if (x.tau != cfg.tau || static_cast<int>(x.re.size()) != cfg.tau ||
      static_cast<int>(x.im.size()) != cfg.tau)
    throw DimensionError("net: history window must have exactly tau frames");
  if (x.rows != cfg.mn() || x.cols != cfg.mn())
    throw DimensionError("net: history frames must be MN x MN");
}

ForwardTrace run_forward(const NetworkParams& params, const InputTensor& x) {
  const Views v(params);
  const NetConfig& cfg = params.cfg;
  check_input(x, cfg);
  const int hid = cfg.lstm_hidden;

  ForwardTrace tr;
  RVec h1 = RVec::Zero(hid), c1 = RVec::Zero(hid);
  RVec h2 = RVec::Zero(hid), c2 = RVec::Zero(hid);
  for (int t = 0; t < cfg.tau; ++t) {
    tr.conv.push_back(conv_forward(v, x.re[t], x.im[t]));
    LstmStep s1 = lstm_step(v.l1_w(), v.l1_u(), v.l1_b(), tr.conv.back().flat, h1, c1);
    h1 = s1.h;
    c1 = s1.c;
    LstmStep s2 = lstm_step(v.l2_w(), v.l2_u(), v.l2_b(), h1, h2, c2);
    h2 = s2.h;
    c2 = s2.c;
    tr.l1.steps.push_back(std::move(s1));
    tr.l2.steps.push_back(std::move(s2));
  }

  tr.fc_raw = v.fc_w() * h2 + v.fc_b();
  const int mn = cfg.mn();
  const ConstMap raw(tr.fc_raw.data(), 2 * mn, cfg.k);
  tr.raw_norm = raw.norm();
  if (!(tr.raw_norm > 0.0))
    throw NumericalError("net: zero pre-normalization precoder");
  const RMat normed = std::sqrt(cfg.p0) / tr.raw_norm * raw;
  tr.precoder = normed.topRows(mn).cast<cxd>() +
                cxd{0.0, 1.0} * normed.bottomRows(mn).cast<cxd>();
  return tr;
}

// reverse of lstm_step across the whole sequence; external_dh[t] holds the
// loss gradient arriving at h_t from outside the layer
void lstm_backward(const ConstMap& w, const ConstMap& u,
                   const std::vector<LstmStep>& steps,
                   const std::vector<const RVec*>& inputs,
                   const std::vector<RVec>& external_dh, MutMap gw, MutMap gu,
                   MutVecMap gb, std::vector<RVec>* dx_out) {
  const int tau = static_cast<int>(steps.size());
  const int hid = static_cast<int>(gb.size()) / 4;
  RVec dh_rec = RVec::Zero(hid), dc_rec = RVec::Zero(hid);
  dx_out->assign(tau, RVec());
  for (int t = tau - 1; t >= 0; --t) {
    const LstmStep& s = steps[t];
    const RVec dh = external_dh[t] + dh_rec;
    const RVec dov = (dh.array() * s.tanh_c.array()).matrix();
    const RVec dc =
        (dh.array() * s.o.array() * (1.0 - s.tanh_c.array().square())).matrix() + dc_rec;
    const RVec c_prev = t > 0 ? steps[t - 1].c : RVec::Zero(hid);
    const RVec h_prev = t > 0 ? steps[t - 1].h : RVec::Zero(hid);

    RVec dz(4 * hid);
    dz.segment(0, hid) =
        (dc.array() * s.g.array() * s.i.array() * (1.0 - s.i.array())).matrix();
    dz.segment(hid, hid) =
        (dc.array() * c_prev.array() * s.f.array() * (1.0 - s.f.array())).matrix();
    dz.segment(2 * hid, hid) =
        (dc.array() * s.i.array() * (1.0 - s.g.array().square())).matrix();
    dz.segment(3 * hid, hid) =
        (dov.array() * s.o.array() * (1.0 - s.o.array())).matrix();

    gw.noalias() += dz * inputs[t]->transpose();
    gu.noalias() += dz * h_prev.transpose();
    gb += dz;
    (*dx_out)[t] = w.transpose() * dz;
    dh_rec = u.transpose() * dz;
    dc_rec = (dc.array() * s.f.array()).matrix();
  }
}

void conv_backward(const Views& v, GradViews& gv, const ConvTrace& tr,
                   const RMat& re, const RMat& im, const RVec& dflat) {
  const NetConfig& cfg = v.cfg;
  const int mn = cfg.mn();
  const int pr = cfg.pooled_rows();
  const int pc = cfg.pooled_cols();
  const RMat* chans[2] = {&re, &im};
  for (int f = 0; f < cfg.conv_filters; ++f) {
    RMat dact = RMat::Zero(mn, mn);
    for (int i = 0; i < pr; ++i)
      for (int j = 0; j < pc; ++j)
        dact(tr.arg_r[f](i, j), tr.arg_c[f](i, j)) += dflat((f * pr + i) * pc + j);
    // ReLU mask
    for (int i = 0; i < mn; ++i)
      for (int j = 0; j < mn; ++j)
        if (tr.relu[f](i, j) <= 0.0) dact(i, j) = 0.0;
    gv.conv_b(f) += dact.sum();
    for (int c = 0; c < 2; ++c) {
      const RMat& x = *chans[c];
      for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) {
          double acc = 0.0;
          for (int i = 0; i < mn; ++i) {
            const int r = i + a - 1;
            if (r < 0 || r >= mn) continue;
            for (int j = 0; j < mn; ++j) {
              const int cc = j + b - 1;
              if (cc < 0 || cc >= mn) continue;
              acc += x(r, cc) * dact(i, j);
            }
          }
          gv.conv_w(f, c, a, b) += acc;
        }
      }
    }
  }
}

}  // namespace

NetworkParams NetworkParams::init(const NetConfig& cfg, Rng& rng) {
  const ParamLayout lay = ParamLayout::make(cfg);
  NetworkParams p{cfg, RVec::Zero(lay.total)};
  const int h = cfg.lstm_hidden;

  auto fill = [&rng](double* dst, int count, double bound) {
    for (int i = 0; i < count; ++i) dst[i] = rng.uniform(-bound, bound);
  };

  double* t = p.theta.data();
  fill(t + lay.conv_w, lay.conv_b - lay.conv_w,
       1.0 / std::sqrt(9.0 * cfg.in_channels()));
  fill(t + lay.l1_w, lay.l1_u - lay.l1_w, 1.0 / std::sqrt(double(cfg.flat_size())));
  fill(t + lay.l1_u, lay.l1_b - lay.l1_u, 1.0 / std::sqrt(double(h)));
  fill(t + lay.l2_w, lay.l2_u - lay.l2_w, 1.0 / std::sqrt(double(h)));
  fill(t + lay.l2_u, lay.l2_b - lay.l2_u, 1.0 / std::sqrt(double(h)));
  fill(t + lay.fc_w, lay.fc_b - lay.fc_w, 1.0 / std::sqrt(double(h)));
  fill(t + lay.fc_b, lay.total - lay.fc_b, 0.01);
  // forget gates open at the start
  MutVecMap(t + lay.l1_b, 4 * h).segment(h, h).setOnes();
  MutVecMap(t + lay.l2_b, 4 * h).segment(h, h).setOnes();
  return p;
}

InputTensor map_input(const HistoryWindow& window, const NetConfig& cfg) {
  if (static_cast<int>(window.frames.size()) != cfg.tau)
    throw DimensionError("map_input: history window must hold exactly tau frames");
  InputTensor x;
  x.tau = cfg.tau;
  x.rows = x.cols = cfg.mn();
  for (const CMat& f : window.frames) {
    if (f.rows() != cfg.mn() || f.cols() != cfg.mn())
      throw DimensionError("map_input: history frames must be MN x MN");
    x.re.push_back(f.real());
    x.im.push_back(f.imag());
  }
  return x;
}

HistoryWindow unmap_input(const InputTensor& x) {
  HistoryWindow w;
  for (int t = 0; t < x.tau; ++t)
    w.frames.push_back(x.re[t].cast<cxd>() + cxd{0.0, 1.0} * x.im[t].cast<cxd>());
  return w;
}

RMat power_normalize(const RMat& raw, double p0) {
  const double norm = raw.norm();
  if (!(norm > 0.0)) throw NumericalError("power_normalize: zero input block");
  return std::sqrt(p0) / norm * raw;
}

RMat power_normalize_backward(const RMat& raw, double p0, const RMat& grad_out) {
  const double norm = raw.norm();
  if (!(norm > 0.0)) throw NumericalError("power_normalize: zero input block");
  const double scale = std::sqrt(p0) / norm;
  const double radial = grad_out.cwiseProduct(raw).sum() / (norm * norm);
  return scale * (grad_out - radial * raw);
}

Precoder forward(const NetworkParams& params, const InputTensor& x) {
  ForwardTrace tr = run_forward(params, x);
  return Precoder{std::move(tr.precoder), params.cfg.p0};
}

Precoder forward(const NetworkParams& params, const HistoryWindow& window) {
  return forward(params, map_input(window, params.cfg));
}

Precoder predict(const NetworkParams& params, const HistoryWindow& window) {
  return forward(params, window);
}

namespace detail {

// per-example cost and (optionally) gradient; shared by cost()/gradient()
double example_cost_grad(const NetworkParams& params, const InputTensor& x,
                         const CMat& h_true, double sigma2,
                         const Constellation& c, RVec* grad_acc) {
  const NetConfig& cfg = params.cfg;
  ForwardTrace tr = run_forward(params, x);
  const DdChannel chan{GridConfig{cfg.m, cfg.n}, h_true};
  const Precoder p{tr.precoder, cfg.p0};

  double fer = 0.0;
  if (!grad_acc) {
    fer = fer_theory(chan, p, sigma2, c);
    return fer;
  }

  const CMat pdot = fer_theory_grad(chan, p, sigma2, c, &fer);
  const int mn = cfg.mn();
  const int hid = cfg.lstm_hidden;
  const Views v(params);
  GradViews gv(cfg, *grad_acc);

  RMat g_norm(2 * mn, cfg.k);
  g_norm.topRows(mn) = pdot.real();
  g_norm.bottomRows(mn) = pdot.imag();
  const ConstMap raw(tr.fc_raw.data(), 2 * mn, cfg.k);
  const RMat g_raw = power_normalize_backward(raw, cfg.p0, g_norm);
  const ConstVecMap g_fc(g_raw.data(), g_raw.size());

  const RVec& h2_last = tr.l2.steps.back().h;
  gv.fc_w().noalias() += g_fc * h2_last.transpose();
  gv.fc_b() += g_fc;

  std::vector<RVec> dh2(cfg.tau, RVec::Zero(hid));
  dh2.back() = v.fc_w().transpose() * g_fc;

  std::vector<const RVec*> x2(cfg.tau);
  for (int t = 0; t < cfg.tau; ++t) x2[t] = &tr.l1.steps[t].h;
  std::vector<RVec> dh1;
  lstm_backward(v.l2_w(), v.l2_u(), tr.l2.steps, x2, dh2, gv.l2_w(), gv.l2_u(),
                gv.l2_b(), &dh1);

  std::vector<const RVec*> x1(cfg.tau);
  for (int t = 0; t < cfg.tau; ++t) x1[t] = &tr.conv[t].flat;
  std::vector<RVec> dflat;
  lstm_backward(v.l1_w(), v.l1_u(), tr.l1.steps, x1, dh1, gv.l1_w(), gv.l1_u(),
                gv.l1_b(), &dflat);

  for (int t = 0; t < cfg.tau; ++t)
    conv_backward(v, gv, tr.conv[t], x.re[t], x.im[t], dflat[t]);
  return fer;
}

InputTensor tensor_from_example(const TrainingSet::ExampleRef& ex, const NetConfig& cfg) {
  InputTensor x;
  x.tau = cfg.tau;
  x.rows = x.cols = cfg.mn();
  for (int i = 0; i < cfg.tau; ++i) {
    const CMat& f = ex.history(i);
    x.re.push_back(f.real());
    x.im.push_back(f.imag());
  }
  return x;
}

}  // namespace detail

}  // namespace otfs
