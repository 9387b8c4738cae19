#include "otfs/dataset.hpp"

#include <cstring>
#include <fstream>

namespace otfs {

int TrainingSet::size() const {
  int n = 0;
  for (const auto& seq : sequences)
    n += std::max(0, static_cast<int>(seq.size()) - tau);
  return n;
}

TrainingSet::ExampleRef TrainingSet::example(int i) const {
  if (i < 0) throw DimensionError("dataset: negative example index");
  for (const auto& seq : sequences) {
    const int here = std::max(0, static_cast<int>(seq.size()) - tau);
    if (i < here) return ExampleRef{&seq, tau + i, tau};
    i -= here;
  }
  throw DimensionError("dataset: example index out of range");
}

TrainingSet gen_dataset(const ExperimentConfig& cfg, uint64_t seed) {
  cfg.validate();
  TrainingSet data;
  data.grid = cfg.grid;
  data.tau = cfg.tau;
  data.nmse = cfg.nmse;
  data.p_count = cfg.chan.p_count;
  data.seed = seed;

  const int per_seq = cfg.dataset_seq_len - cfg.tau;
  const int n_seq = (cfg.dataset_examples + per_seq - 1) / per_seq;
  const Rng base(seed);
  for (int s = 0; s < n_seq; ++s) {
    Rng noise = base.substream(0x10000ull + s);
    const auto frames = channel_sequence(cfg.chan, cfg.grid, cfg.dataset_seq_len,
                                         base.substream(s).seed());
    std::vector<FramePair> seq;
    seq.reserve(frames.size());
    for (const auto& f : frames) {
      FramePair pair;
      pair.truth = f.channel.matrix;
      pair.estimate = corrupt_estimate(f.channel, cfg.nmse, noise).matrix;
      seq.push_back(std::move(pair));
    }
    data.sequences.push_back(std::move(seq));
  }
  return data;
}

namespace {

constexpr char kMagic[8] = {'O', 'T', 'F', 'S', 'D', 'S', 'N', '1'};

template <typename T>
void put(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw IoError("dataset: truncated file");
  return v;
}

// row-major (re, im) pairs
void put_matrix(std::ostream& os, const CMat& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      put<double>(os, m(i, j).real());
      put<double>(os, m(i, j).imag());
    }
}

CMat get_matrix(std::istream& is, int rows, int cols) {
  CMat m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) {
      const double re = get<double>(is);
      const double im = get<double>(is);
      m(i, j) = cxd{re, im};
    }
  return m;
}

}  // namespace

void save_dataset(const std::string& path, const TrainingSet& data) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("dataset: cannot open " + path + " for writing");
  os.write(kMagic, sizeof(kMagic));
  put<uint32_t>(os, 1);
  put<int32_t>(os, data.grid.m);
  put<int32_t>(os, data.grid.n);
  put<double>(os, data.grid.carrier_hz);
  put<double>(os, data.grid.delta_f_hz);
  put<int32_t>(os, data.p_count);
  put<int32_t>(os, data.tau);
  put<double>(os, data.nmse);
  put<uint64_t>(os, data.seed);
  put<uint32_t>(os, static_cast<uint32_t>(data.sequences.size()));
  for (const auto& seq : data.sequences) {
    put<uint32_t>(os, static_cast<uint32_t>(seq.size()));
    for (const auto& f : seq) {
      put_matrix(os, f.truth);
      put_matrix(os, f.estimate);
    }
  }
  if (!os) throw IoError("dataset: write failed for " + path);
}

TrainingSet load_dataset(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("dataset: cannot open " + path);
  char magic[8];
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw IoError("dataset: bad magic in " + path);
  if (get<uint32_t>(is) != 1) throw IoError("dataset: unsupported version");
  TrainingSet data;
  data.grid.m = get<int32_t>(is);
  data.grid.n = get<int32_t>(is);
  data.grid.carrier_hz = get<double>(is);
  data.grid.delta_f_hz = get<double>(is);
  data.p_count = get<int32_t>(is);
  data.tau = get<int32_t>(is);
  data.nmse = get<double>(is);
  data.seed = get<uint64_t>(is);
  data.grid.validate();
  const int mn = data.grid.frame_size();
  const auto n_seq = get<uint32_t>(is);
  data.sequences.resize(n_seq);
  for (auto& seq : data.sequences) {
    const auto len = get<uint32_t>(is);
    seq.resize(len);
    for (auto& f : seq) {
      f.truth = get_matrix(is, mn, mn);
      f.estimate = get_matrix(is, mn, mn);
    }
  }
  return data;
}

}  // namespace otfs
