#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "varprec/assim.hpp"

namespace varprec::dataset {

using varprec::Matrix;
using varprec::Vector;

/// One training triple: linearization state, Gaussian probe block, and the
/// Gauss-Newton operator applied to it.
struct TrainingSample {
  Vector x;  // packed state, length n
  Matrix Z;  // n x k, iid standard normal columns
  Matrix Y;  // n x k, Y = A_x Z
};

/// Random-walk trajectory sampler: each new state is the previous one,
/// perturbed with white noise per variable and advanced by a random number
/// of model steps.
struct TrajectorySamplerConfig {
  Vector base_state;  // packed starting state
  int lead_min = 1;   // model steps, inclusive
  int lead_max = 1;
  double amp_eta = 0.0;  // perturbation standard deviations
  double amp_u = 0.0;
  double amp_v = 0.0;
  std::uint64_t seed = 0;

  void validate() const {
    if (lead_min < 1 || lead_max < lead_min)
      throw ConfigError("sampler: need 1 <= lead_min <= lead_max");
    if (amp_eta < 0 || amp_u < 0 || amp_v < 0)
      throw ConfigError("sampler: perturbation amplitudes must be >= 0");
  }
};

/// Unbounded online sample generator. Holds O(n) persistent state; each
/// next() builds one linearization trajectory, draws Z and computes A_x Z.
/// Not meant to be shared across consumers.
class SampleStream {
public:
  SampleStream(assim::FourDVarProblem problem, TrajectorySamplerConfig cfg, int k);

  TrainingSample next();

  int k() const { return k_; }
  Eigen::Index state_dim() const { return problem_.grid.state_size(); }
  long samples_produced() const { return index_; }
  long blowups_resampled() const { return blowups_; }

  /// Bytes of persistent buffers owned by the stream; independent of the
  /// number of samples consumed.
  std::size_t resident_bytes() const;

private:
  Vector advance(const Vector& x, long sample_index);

  assim::FourDVarProblem problem_;
  TrajectorySamplerConfig cfg_;
  int k_;
  Vector current_;
  long index_ = 0;
  long blowups_ = 0;
};

/// n_batch samples from a fresh stream with the given configuration;
/// identical to taking the first n_batch items of SampleStream.
std::vector<TrainingSample> generate_batch(const assim::FourDVarProblem& problem,
                                           const TrajectorySamplerConfig& cfg,
                                           int n_batch, int k);

/// Shard container: header (magic "PCDS", version u32, n u32, k u32,
/// count u64) then per sample x, Z column-major, Y column-major, all
/// little-endian f64.
void write_shard(const std::string& path, const std::vector<TrainingSample>& samples);
std::vector<TrainingSample> read_shard(const std::string& path);

/// Payload bytes a shard of `count` samples occupies, excluding the header.
inline std::uint64_t shard_payload_bytes(Eigen::Index n, int k, std::uint64_t count) {
  return count * static_cast<std::uint64_t>(n + 2 * n * k) * 8u;
}
constexpr std::uint64_t kShardHeaderBytes = 24;

}  // namespace varprec::dataset
