#include "sbbp/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace sbbp {

MiniBatch draw_uniform_batch(SplitMix64& rng, int m, int tau) {
  if (tau < 1 || tau > m) {
    throw std::out_of_range("draw_uniform_batch: tau must lie in [1, m]");
  }
  // Floyd's subset sampling: tau distinct indices, uniform over subsets.
  MiniBatch batch;
  batch.indices.reserve(tau);
  for (int i = m - tau; i < m; ++i) {
    const int j = static_cast<int>(rng.below(static_cast<std::uint64_t>(i) + 1));
    const bool seen =
        std::find(batch.indices.begin(), batch.indices.end(), j) != batch.indices.end();
    batch.indices.push_back(seen ? i : j);
  }
  std::sort(batch.indices.begin(), batch.indices.end());
  batch.weights.assign(tau, 1.0 / tau);
  return batch;
}

Partition build_partition(SplitMix64& rng, int m, int tau) {
  if (tau < 1 || tau > m) {
    throw std::out_of_range("build_partition: tau must lie in [1, m]");
  }
  std::vector<int> perm(m);
  std::iota(perm.begin(), perm.end(), 0);
  for (int i = m - 1; i > 0; --i) {
    const int j = static_cast<int>(rng.below(static_cast<std::uint64_t>(i) + 1));
    std::swap(perm[i], perm[j]);
  }
  const int num_blocks = m / tau;
  Partition partition;
  partition.block_size = tau;
  partition.blocks.resize(num_blocks);
  int at = 0;
  for (int b = 0; b < num_blocks; ++b) {
    const int size = (b + 1 == num_blocks) ? m - at : tau;
    partition.blocks[b].assign(perm.begin() + at, perm.begin() + at + size);
    std::sort(partition.blocks[b].begin(), partition.blocks[b].end());
    at += size;
  }
  return partition;
}

MiniBatch draw_partition_block(SplitMix64& rng, const Partition& partition) {
  if (partition.blocks.empty()) {
    throw std::invalid_argument("draw_partition_block: empty partition");
  }
  const std::size_t pick = rng.below(partition.blocks.size());
  MiniBatch batch;
  batch.indices = partition.blocks[pick];
  batch.weights.assign(batch.indices.size(), 1.0 / batch.indices.size());
  return batch;
}

namespace {

// Largest eigenvalue of the 2x2 symmetric matrix [[a, b], [b, c]].
double sym2x2_max_eig(double a, double b, double c) {
  const double half_trace = 0.5 * (a + c);
  const double disc = std::sqrt(0.25 * (a - c) * (a - c) + b * b);
  return half_trace + disc;
}

}  // namespace

double spectral_norm_sq(const Eigen::MatrixXd& a) {
  if (a.rows() == 0 || a.cols() == 0 || a.isZero(0.0)) {
    throw std::invalid_argument("spectral_norm_sq: zero or empty matrix");
  }
  // Closed form through the Gram matrix of the smaller side.
  const Eigen::Index k = std::min(a.rows(), a.cols());
  if (k == 1) {
    return a.rows() <= a.cols() ? a.row(0).squaredNorm() : a.col(0).squaredNorm();
  }
  if (k == 2) {
    Eigen::Matrix2d gram = a.rows() <= a.cols()
                               ? Eigen::Matrix2d(a * a.transpose())
                               : Eigen::Matrix2d(a.transpose() * a);
    return sym2x2_max_eig(gram(0, 0), gram(0, 1), gram(1, 1));
  }

  const Eigen::Index n = a.cols();
  constexpr int kMaxIters = 1000;
  constexpr double kTol = 1e-8;
  for (int attempt = 0; attempt < 2; ++attempt) {
    Eigen::VectorXd v;
    if (attempt == 0) {
      v = Eigen::VectorXd::Ones(n);
    } else {
      SplitMix64 restart_rng(0xA5A5A5A5A5A5A5A5ULL);
      v.resize(n);
      for (Eigen::Index j = 0; j < n; ++j) v[j] = restart_rng.gaussian();
    }
    v /= v.norm();
    double rho_prev = -1.0;
    double rho = 0.0;
    for (int iter = 0; iter < kMaxIters; ++iter) {
      const Eigen::VectorXd w = a * v;
      rho = w.squaredNorm();
      if (rho == 0.0) break;  // v in the null space; try the restart vector
      if (rho_prev >= 0.0 && std::abs(rho - rho_prev) <= kTol * rho) return rho;
      rho_prev = rho;
      v = a.transpose() * w;
      v /= v.norm();
    }
    if (rho > 0.0) return rho;  // hit the cap; last Rayleigh quotient
  }
  throw std::runtime_error("spectral_norm_sq: power iteration stagnated");
}

int optimal_block_size(const Eigen::MatrixXd& a) {
  const int m = static_cast<int>(a.rows());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    if (std::abs(a.row(i).squaredNorm() - 1.0) > 1e-6) {
      throw std::invalid_argument("optimal_block_size: rows must be unit norm");
    }
  }
  const double sigma_sq = spectral_norm_sq(a);
  // nudge below the floor so 1-ulp noise in sigma_sq cannot drop a clean
  // integer quotient (e.g. m/1.0000000000000002) to the next value down
  const double quotient = m / sigma_sq;
  const int tau = static_cast<int>(std::floor(quotient * (1.0 + 1e-9)));
  return std::clamp(tau, 1, m);
}

Sampler::Sampler(const SamplerConfig& config, int m)
    : config_(config), m_(m), rng_(config.seed) {
  if (config_.tau < 1 || config_.tau > m_) {
    throw std::out_of_range("Sampler: tau must lie in [1, m]");
  }
  if (config_.mode == SamplingMode::Partition) {
    partition_ = build_partition(rng_, m_, config_.tau);
  }
}

MiniBatch Sampler::next() {
  if (config_.mode == SamplingMode::UniformNoReplacement) {
    return draw_uniform_batch(rng_, m_, config_.tau);
  }
  return draw_partition_block(rng_, partition_);
}

}  // namespace sbbp
