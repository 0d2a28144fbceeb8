#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "sbbp/deviation.hpp"
#include "sbbp/rng.hpp"

namespace sbbp {

// Random row-normalized Gaussian system with an s-sparse ground truth xhat
// and b = A xhat, so xhat is feasible (inequality rows are active at xhat).
struct LfpSpec {
  int m = 0;
  int n = 0;
  int s = 0;
  std::vector<ConstraintKind> kinds;  // empty: all Inequality
  std::uint64_t seed = 0;
};

struct LfpInstance {
  LfpProblem problem;
  Eigen::VectorXd xhat;
};

LfpInstance gen_lfp(const LfpSpec& spec);

// Unit vector v with A^T v = 0, via conjugate gradients on the normal
// equations of min_y ||Ay - v0||. Requires M > n and full column rank.
Eigen::VectorXd nullspace_unit_vector(const Eigen::MatrixXd& a, SplitMix64& rng);
Eigen::VectorXd nullspace_unit_vector_from(const Eigen::MatrixXd& a,
                                           const Eigen::VectorXd& v0);

// Gaussian measurement blocks with ball constraints around a perturbed
// right-hand side. Consistent: b^s = b + sigma sign(eps), radius sqrt(xi)
// sigma, so every block is active at xhat. Inconsistent: b^s = b + sigma
// sqrt(M) v with v in the left null space, radius sqrt(xi) sigma / 2, so no
// feasible point exists.
struct SfpSpec {
  int total_rows = 0;  // M = blocks * xi
  int blocks = 0;      // m
  int n = 0;
  int xi = 0;
  int s = 0;
  double sigma = 0.0;
  bool consistent = true;
  std::uint64_t seed = 0;
};

struct SfpInstance {
  SfpProblem problem;
  Eigen::VectorXd xhat;
  Eigen::VectorXd b;  // unperturbed A xhat
};

SfpInstance gen_sfp(const SfpSpec& spec);

}  // namespace sbbp
