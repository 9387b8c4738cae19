#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "otfs/dataset.hpp"
#include "otfs/link.hpp"

namespace otfs {

/// Architecture of the predictive precoder network. All layer sizes derive
/// from (M, N, K, tau); nothing is hard-coded to one grid.
struct NetConfig {
  int m = 8;
  int n = 4;
  int k = 32;
  int tau = 5;
  double p0 = 32.0;

  int conv_filters = 2;
  int conv_kernel = 3;
  int lstm_hidden = 32;

  int mn() const { return m * n; }
  int in_channels() const { return 2; }  // Re / Im
  // max pool: 2x2 window, stride 2 down the delay axis only, size-preserving
  // along the Doppler axis
  int pooled_rows() const { return (mn() + 1) / 2; }
  int pooled_cols() const { return mn(); }
  int flat_size() const { return conv_filters * pooled_rows() * pooled_cols(); }
  int fc_out() const { return 2 * mn() * k; }

  void validate() const;
  bool operator==(const NetConfig&) const = default;
};

// Offsets of each weight block inside the flat parameter vector.
struct ParamLayout {
  int conv_w = 0, conv_b = 0;
  int l1_w = 0, l1_u = 0, l1_b = 0;
  int l2_w = 0, l2_u = 0, l2_b = 0;
  int fc_w = 0, fc_b = 0;
  int total = 0;

  static ParamLayout make(const NetConfig& cfg);
};

/// All trainable scalars in one flat vector (conv filters/biases, two LSTM
/// layers, FC head), addressable for gradient checking and checkpoints.
struct NetworkParams {
  NetConfig cfg;
  RVec theta;

  ParamLayout layout() const { return ParamLayout::make(cfg); }
  static NetworkParams init(const NetConfig& cfg, Rng& rng);
};

/// The tau most recent estimated DD channels, oldest first, each MN x MN.
struct HistoryWindow {
  std::vector<CMat> frames;
};

/// Real tensor view of a history window: per step, channel 0 carries the
/// real parts and channel 1 the imaginary parts.
struct InputTensor {
  int tau = 0;
  int rows = 0;
  int cols = 0;
  std::vector<RMat> re;
  std::vector<RMat> im;
};

InputTensor map_input(const HistoryWindow& window, const NetConfig& cfg);
HistoryWindow unmap_input(const InputTensor& x);

/// Frobenius normalization of the raw FC output block to sqrt(p0), and its
/// backward map (exposed for direct testing).
RMat power_normalize(const RMat& raw, double p0);
RMat power_normalize_backward(const RMat& raw, double p0, const RMat& grad_out);

/// Full forward pass: conv+ReLU, max-pool, flatten, two LSTM layers, FC,
/// power normalization, real/imag split. ||P||_F^2 == p0 by construction.
Precoder forward(const NetworkParams& params, const InputTensor& x);
Precoder forward(const NetworkParams& params, const HistoryWindow& window);

/// Mean closed-form FER of predicted precoders over a batch of examples,
/// with the true channel inside the objective.
double cost(const NetworkParams& params, const TrainingSet& data,
            const std::vector<int>& batch, double sigma2, const Constellation& c);

/// Exact reverse-mode derivative of cost() w.r.t. every trainable scalar.
RVec gradient(const NetworkParams& params, const TrainingSet& data,
              const std::vector<int>& batch, double sigma2,
              const Constellation& c, double* cost_out = nullptr);

struct TrainHyper {
  double lr = 1e-3;
  int batch_size = 64;
  int max_iters = 2000;
  int patience = 20;    // evaluations without improvement before stopping
  int eval_every = 25;  // iterations between validation evaluations
  double val_fraction = 0.1;
  int val_subset_cap = 128;
};

struct TrainStats {
  std::vector<double> train_cost;             // one entry per iteration
  std::vector<std::pair<int, double>> val_cost;
  double initial_val = 0.0;
  double best_val = 0.0;
  int iterations = 0;
};

/// Adam + early stopping on a held-out split; returns the best-validation
/// parameters. Bitwise reproducible for a fixed seed and worker count.
NetworkParams train(const TrainingSet& data, const NetConfig& cfg,
                    const TrainHyper& hyper, double sigma2,
                    const Constellation& c, uint64_t seed,
                    TrainStats* stats = nullptr, bool verbose = false);

Precoder predict(const NetworkParams& params, const HistoryWindow& window);

struct CheckpointMeta {
  int constellation_order = 4;
  uint64_t seed = 0;
  uint64_t iterations = 0;
};

void save_checkpoint(const std::string& path, const NetworkParams& params,
                     const CheckpointMeta& meta);
NetworkParams load_checkpoint(const std::string& path,
                              CheckpointMeta* meta = nullptr);

}  // namespace otfs
