#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iostream>
#include <numeric>

#include "net_detail.hpp"
#include "otfs/parallel.hpp"

namespace otfs {

namespace {

// deterministic chunked reduction: workers own contiguous example blocks,
// blocks are combined in order, so a fixed seed and worker count reproduce
// the result bitwise
double batch_cost_grad(const NetworkParams& params, const TrainingSet& data,
                       const std::vector<int>& batch, double sigma2,
                       const Constellation& c, RVec* grad_out) {
  if (batch.empty()) throw ConfigError("net: empty batch");
  const int nb = static_cast<int>(batch.size());
  const int blocks = std::min(worker_count(), nb);
  const int per = (nb + blocks - 1) / blocks;

  std::vector<double> cost_acc(blocks, 0.0);
  std::vector<RVec> grad_acc;
  if (grad_out)
    grad_acc.assign(blocks, RVec::Zero(params.theta.size()));

  parallel_for(blocks, [&](int blk) {
    const int lo = blk * per;
    const int hi = std::min(nb, lo + per);
    for (int i = lo; i < hi; ++i) {
      const auto ex = data.example(batch[i]);
      const InputTensor x = detail::tensor_from_example(ex, params.cfg);
      cost_acc[blk] += detail::example_cost_grad(
          params, x, ex.truth(), sigma2, c, grad_out ? &grad_acc[blk] : nullptr);
    }
  });

  double total = 0.0;
  for (int blk = 0; blk < blocks; ++blk) total += cost_acc[blk];
  if (grad_out) {
    grad_out->setZero();
    for (int blk = 0; blk < blocks; ++blk) *grad_out += grad_acc[blk];
    *grad_out /= static_cast<double>(nb);
  }
  const double mean = total / nb;
  if (!std::isfinite(mean))
    throw TrainingDivergenceError("net: non-finite cost");
  return mean;
}

}  // namespace

double cost(const NetworkParams& params, const TrainingSet& data,
            const std::vector<int>& batch, double sigma2, const Constellation& c) {
  return batch_cost_grad(params, data, batch, sigma2, c, nullptr);
}

RVec gradient(const NetworkParams& params, const TrainingSet& data,
              const std::vector<int>& batch, double sigma2,
              const Constellation& c, double* cost_out) {
  RVec grad(params.theta.size());
  const double j = batch_cost_grad(params, data, batch, sigma2, c, &grad);
  if (cost_out) *cost_out = j;
  if (!grad.allFinite())
    throw TrainingDivergenceError("net: non-finite gradient");
  return grad;
}

NetworkParams train(const TrainingSet& data, const NetConfig& cfg,
                    const TrainHyper& hyper, double sigma2,
                    const Constellation& c, uint64_t seed, TrainStats* stats,
                    bool verbose) {
  if (data.size() < 1) throw ConfigError("train: empty dataset");
  cfg.validate();

  Rng rng(mix64(seed ^ 0x7261696eull));
  NetworkParams params = NetworkParams::init(cfg, rng);

  // shuffled train/validation split
  std::vector<int> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  for (int i = static_cast<int>(order.size()) - 1; i > 0; --i)
    std::swap(order[i], order[rng.uniform_int(0, i)]);
  int n_val = static_cast<int>(std::lround(hyper.val_fraction * order.size()));
  n_val = std::min<int>(n_val, static_cast<int>(order.size()) - 1);
  std::vector<int> val(order.begin(), order.begin() + n_val);
  std::vector<int> trn(order.begin() + n_val, order.end());
  if (val.empty()) val = trn;  // tiny datasets validate on the train split
  if (static_cast<int>(val.size()) > hyper.val_subset_cap)
    val.resize(hyper.val_subset_cap);

  // Adam moments
  RVec m = RVec::Zero(params.theta.size());
  RVec v = RVec::Zero(params.theta.size());
  const double b1 = 0.9, b2 = 0.999, eps = 1e-8;

  double best_val = cost(params, data, val, sigma2, c);
  RVec best_theta = params.theta;
  if (stats) {
    stats->initial_val = best_val;
    stats->val_cost.push_back({0, best_val});
  }
  if (verbose)
    std::cerr << "train: initial validation cost " << best_val << "\n";

  int since_best = 0;
  int it = 0;
  RVec grad(params.theta.size());
  std::vector<int> batch(std::min<int>(hyper.batch_size, static_cast<int>(trn.size())));
  for (it = 1; it <= hyper.max_iters; ++it) {
    for (auto& idx : batch)
      idx = trn[rng.uniform_int(0, static_cast<int>(trn.size()) - 1)];
    double j = 0.0;
    grad = gradient(params, data, batch, sigma2, c, &j);
    if (stats) stats->train_cost.push_back(j);

    if (hyper.lr != 0.0) {
      const double corr1 = 1.0 - std::pow(b1, it);
      const double corr2 = 1.0 - std::pow(b2, it);
      m = b1 * m + (1.0 - b1) * grad;
      v = b2 * v + (1.0 - b2) * grad.cwiseProduct(grad).eval();
      params.theta.array() -=
          hyper.lr * (m.array() / corr1) /
          ((v.array() / corr2).sqrt() + eps);
    }

    if (it % hyper.eval_every == 0) {
      const double vc = cost(params, data, val, sigma2, c);
      if (stats) stats->val_cost.push_back({it, vc});
      if (verbose)
        std::cerr << "train: iter " << it << " batch cost " << j
                  << " validation cost " << vc << "\n";
      if (vc < best_val) {
        best_val = vc;
        best_theta = params.theta;
        since_best = 0;
      } else if (++since_best >= hyper.patience) {
        break;
      }
    }
  }

  params.theta = best_theta;
  if (stats) {
    stats->best_val = best_val;
    stats->iterations = std::min(it, hyper.max_iters);
  }
  return params;
}

namespace {

template <typename T>
void put(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw IoError("checkpoint: truncated file");
  return v;
}

constexpr char kMagic[8] = {'D', 'D', 'C', 'L', 'N', 'E', 'T', '1'};

}  // namespace

void save_checkpoint(const std::string& path, const NetworkParams& params,
                     const CheckpointMeta& meta) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("checkpoint: cannot open " + path + " for writing");
  os.write(kMagic, sizeof(kMagic));
  put<uint32_t>(os, 1);
  put<int32_t>(os, params.cfg.m);
  put<int32_t>(os, params.cfg.n);
  put<int32_t>(os, params.cfg.k);
  put<int32_t>(os, params.cfg.tau);
  put<double>(os, params.cfg.p0);
  put<int32_t>(os, params.cfg.conv_filters);
  put<int32_t>(os, params.cfg.conv_kernel);
  put<int32_t>(os, params.cfg.lstm_hidden);
  put<int32_t>(os, meta.constellation_order);
  put<uint64_t>(os, meta.seed);
  put<uint64_t>(os, meta.iterations);
  put<uint64_t>(os, static_cast<uint64_t>(params.theta.size()));
  os.write(reinterpret_cast<const char*>(params.theta.data()),
           static_cast<std::streamsize>(params.theta.size() * sizeof(double)));
  if (!os) throw IoError("checkpoint: write failed for " + path);
}

NetworkParams load_checkpoint(const std::string& path, CheckpointMeta* meta) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("checkpoint: cannot open " + path);
  char magic[8];
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw IoError("checkpoint: bad magic in " + path);
  if (get<uint32_t>(is) != 1) throw IoError("checkpoint: unsupported version");
  NetConfig cfg;
  cfg.m = get<int32_t>(is);
  cfg.n = get<int32_t>(is);
  cfg.k = get<int32_t>(is);
  cfg.tau = get<int32_t>(is);
  cfg.p0 = get<double>(is);
  cfg.conv_filters = get<int32_t>(is);
  cfg.conv_kernel = get<int32_t>(is);
  cfg.lstm_hidden = get<int32_t>(is);
  CheckpointMeta m;
  m.constellation_order = get<int32_t>(is);
  m.seed = get<uint64_t>(is);
  m.iterations = get<uint64_t>(is);
  const auto count = get<uint64_t>(is);
  const ParamLayout lay = ParamLayout::make(cfg);
  if (count != static_cast<uint64_t>(lay.total))
    throw IoError("checkpoint: parameter count does not match the header");
  NetworkParams params{cfg, RVec(lay.total)};
  is.read(reinterpret_cast<char*>(params.theta.data()),
          static_cast<std::streamsize>(lay.total * sizeof(double)));
  if (!is) throw IoError("checkpoint: truncated parameters in " + path);
  if (meta) *meta = m;
  return params;
}

}  // namespace otfs
