#include "varprec/dataset.hpp"

#include <cstring>
#include <fstream>
#include <iostream>

#include "varprec/rng.hpp"

namespace varprec::dataset {

namespace {
// rng stream tags per purpose; attempt-dependent so a resample after a
// blowup draws a fresh perturbation
constexpr std::uint64_t kStreamProbes = 1;
constexpr std::uint64_t kStreamPerturb = 2;
}  // namespace

SampleStream::SampleStream(assim::FourDVarProblem problem,
                           TrajectorySamplerConfig cfg, int k)
    : problem_(std::move(problem)), cfg_(std::move(cfg)), k_(k) {
  cfg_.validate();
  if (k_ < 1) throw ConfigError("stream: k must be >= 1");
  if (cfg_.base_state.size() != problem_.grid.state_size())
    throw ShapeError("stream: base state does not match grid");
  current_ = cfg_.base_state;
}

Vector SampleStream::advance(const Vector& x, long sample_index) {
  const auto& g = problem_.grid;
  const std::uint64_t key =
      derive_seed(cfg_.seed, static_cast<std::uint64_t>(sample_index));
  for (int attempt = 0; attempt < 50; ++attempt) {
    CounterRng rng(key, kStreamPerturb + static_cast<std::uint64_t>(attempt));
    Vector pert(x.size());
    for (Eigen::Index i = 0; i < g.eta_size(); ++i)
      pert[i] = cfg_.amp_eta * rng.next_gauss();
    for (Eigen::Index i = g.eta_size(); i < g.eta_size() + g.u_size(); ++i)
      pert[i] = cfg_.amp_u * rng.next_gauss();
    for (Eigen::Index i = g.eta_size() + g.u_size(); i < x.size(); ++i)
      pert[i] = cfg_.amp_v * rng.next_gauss();
    const long lead = rng.next_int(cfg_.lead_min, cfg_.lead_max);
    try {
      const sw::StateVector xs = sw::unpack(x + pert, g);
      return sw::pack(
          sw::propagate(xs, static_cast<int>(lead), problem_.params, g));
    } catch (const NumericalBlowup&) {
      ++blowups_;
      std::cerr << "[dataset] blowup while advancing from sample " << sample_index
                << " (attempt " << attempt << "), resampling perturbation\n";
    }
  }
  throw NumericalBlowup("sampler could not advance without blowing up", index_);
}

TrainingSample SampleStream::next() {
  const std::uint64_t key =
      derive_seed(cfg_.seed, static_cast<std::uint64_t>(index_));
  CounterRng zrng(key, kStreamProbes);

  TrainingSample s;
  s.x = current_;
  s.Z = zrng.gauss_matrix(state_dim(), k_);
  s.Y = Matrix(state_dim(), k_);
  const auto A = assim::gn_operator(problem_, s.x);
  for (int j = 0; j < k_; ++j) s.Y.col(j) = A(s.Z.col(j));

  current_ = advance(current_, index_);
  ++index_;
  return s;
}

std::size_t SampleStream::resident_bytes() const {
  return sizeof(double) *
         (static_cast<std::size_t>(current_.size()) + cfg_.base_state.size() +
          problem_.cov.b_var.size() + problem_.cov.r_var.size() +
          problem_.cov.x_b.size() + problem_.y.size());
}

std::vector<TrainingSample> generate_batch(const assim::FourDVarProblem& problem,
                                           const TrajectorySamplerConfig& cfg,
                                           int n_batch, int k) {
  SampleStream stream(problem, cfg, k);
  std::vector<TrainingSample> out;
  out.reserve(n_batch);
  for (int i = 0; i < n_batch; ++i) out.push_back(stream.next());
  return out;
}

namespace {
constexpr char kMagic[4] = {'P', 'C', 'D', 'S'};
constexpr std::uint32_t kVersion = 1;

void write_block(std::ofstream& f, const double* p, std::streamsize count) {
  f.write(reinterpret_cast<const char*>(p), count * std::streamsize(sizeof(double)));
}
}  // namespace

void write_shard(const std::string& path, const std::vector<TrainingSample>& samples) {
  if (samples.empty()) throw IoError("write_shard: refusing to write an empty shard");
  const Eigen::Index n = samples.front().x.size();
  const int k = static_cast<int>(samples.front().Z.cols());
  for (const auto& s : samples)
    if (s.x.size() != n || s.Z.rows() != n || s.Z.cols() != k || s.Y.rows() != n ||
        s.Y.cols() != k)
      throw ShapeError("write_shard: inconsistent sample dimensions");

  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("write_shard: cannot open " + path);
  const std::uint32_t n32 = static_cast<std::uint32_t>(n);
  const std::uint32_t k32 = static_cast<std::uint32_t>(k);
  const std::uint64_t count = samples.size();
  f.write(kMagic, 4);
  f.write(reinterpret_cast<const char*>(&kVersion), 4);
  f.write(reinterpret_cast<const char*>(&n32), 4);
  f.write(reinterpret_cast<const char*>(&k32), 4);
  f.write(reinterpret_cast<const char*>(&count), 8);
  for (const auto& s : samples) {
    write_block(f, s.x.data(), s.x.size());
    write_block(f, s.Z.data(), s.Z.size());
    write_block(f, s.Y.data(), s.Y.size());
  }
  if (!f) throw IoError("write_shard: short write to " + path);
}

std::vector<TrainingSample> read_shard(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("read_shard: cannot open " + path);
  char magic[4];
  std::uint32_t version = 0, n = 0, k = 0;
  std::uint64_t count = 0;
  f.read(magic, 4);
  f.read(reinterpret_cast<char*>(&version), 4);
  f.read(reinterpret_cast<char*>(&n), 4);
  f.read(reinterpret_cast<char*>(&k), 4);
  f.read(reinterpret_cast<char*>(&count), 8);
  if (!f || std::memcmp(magic, kMagic, 4) != 0)
    throw VersionError("read_shard: bad magic in " + path);
  if (version != kVersion)
    throw VersionError("read_shard: unsupported version " + std::to_string(version));

  std::vector<TrainingSample> samples(count);
  for (auto& s : samples) {
    s.x = Vector(n);
    s.Z = Matrix(n, k);
    s.Y = Matrix(n, k);
    f.read(reinterpret_cast<char*>(s.x.data()), std::streamsize(sizeof(double)) * n);
    f.read(reinterpret_cast<char*>(s.Z.data()),
           std::streamsize(sizeof(double)) * s.Z.size());
    f.read(reinterpret_cast<char*>(s.Y.data()),
           std::streamsize(sizeof(double)) * s.Y.size());
    if (!f) throw IoError("read_shard: truncated payload in " + path);
  }
  return samples;
}

}  // namespace varprec::dataset
