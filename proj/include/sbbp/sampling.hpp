#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "sbbp/deviation.hpp"
#include "sbbp/rng.hpp"

namespace sbbp {

// Disjoint index blocks covering [m]; when tau does not divide m the
// remainder is absorbed by the last block.
struct Partition {
  std::vector<std::vector<int>> blocks;
  int block_size = 0;  // nominal tau
};

enum class SamplingMode { UniformNoReplacement, Partition };

struct SamplerConfig {
  SamplingMode mode = SamplingMode::UniformNoReplacement;
  int tau = 1;
  std::uint64_t seed = 0;
};

// tau distinct indices, uniform over size-tau subsets of [m]; weights 1/tau.
MiniBatch draw_uniform_batch(SplitMix64& rng, int m, int tau);

// A uniformly random permutation of [m] chopped into floor(m/tau) blocks.
Partition build_partition(SplitMix64& rng, int m, int tau);

// One block chosen uniformly; weights 1/|block|.
MiniBatch draw_partition_block(SplitMix64& rng, const Partition& partition);

// sigma_max(A)^2 via power iteration on A^T A (Rayleigh-quotient change
// below 1e-8, at most 1000 iterations, all-ones start with one seeded random
// restart); closed form when the smaller dimension is at most 2.
double spectral_norm_sq(const Eigen::MatrixXd& a);

// tau* = floor(m / sigma_max(A)^2) clamped to [1, m]; rows must be unit norm.
int optimal_block_size(const Eigen::MatrixXd& a);

// Owns one RNG stream; for partition mode the partition is drawn once at
// construction and fixed for the sampler's lifetime.
class Sampler {
 public:
  Sampler(const SamplerConfig& config, int m);
  MiniBatch next();
  const Partition& partition() const { return partition_; }

 private:
  SamplerConfig config_;
  int m_;
  SplitMix64 rng_;
  Partition partition_;
};

}  // namespace sbbp
