#include "sbbp/instances.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace sbbp {

namespace {

// s distinct support indices (sorted) via Floyd sampling, then one Gaussian
// value per support entry in index order.
Eigen::VectorXd sparse_gaussian(SplitMix64& rng, int n, int s) {
  std::vector<int> support;
  support.reserve(s);
  for (int i = n - s; i < n; ++i) {
    const int j = static_cast<int>(rng.below(static_cast<std::uint64_t>(i) + 1));
    const bool seen = std::find(support.begin(), support.end(), j) != support.end();
    support.push_back(seen ? i : j);
  }
  std::sort(support.begin(), support.end());
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  for (int j : support) {
    double v = rng.gaussian();
    while (v == 0.0) v = rng.gaussian();
    x[j] = v;
  }
  return x;
}

}  // namespace

LfpInstance gen_lfp(const LfpSpec& spec) {
  if (spec.m < 1 || spec.n < 1 || spec.s < 1 || spec.s > spec.n) {
    throw std::invalid_argument("gen_lfp: need m, n >= 1 and 1 <= s <= n");
  }
  if (!spec.kinds.empty() &&
      static_cast<int>(spec.kinds.size()) != spec.m) {
    throw std::invalid_argument("gen_lfp: kinds size must equal m");
  }
  SplitMix64 rng(spec.seed);
  RowMajorMatrix a(spec.m, spec.n);
  for (int i = 0; i < spec.m; ++i) {
    double norm = 0.0;
    do {
      for (int j = 0; j < spec.n; ++j) a(i, j) = rng.gaussian();
      norm = a.row(i).norm();
    } while (norm == 0.0);
    a.row(i) /= norm;
  }
  Eigen::VectorXd xhat = sparse_gaussian(rng, spec.n, spec.s);
  // b_i from the same row-dot expression the deviation functions use, so the
  // feasibility residual of xhat is exactly zero.
  Eigen::VectorXd b(spec.m);
  for (int i = 0; i < spec.m; ++i) b[i] = a.row(i).dot(xhat);
  std::vector<ConstraintKind> kinds =
      spec.kinds.empty()
          ? std::vector<ConstraintKind>(spec.m, ConstraintKind::Inequality)
          : spec.kinds;
  return LfpInstance{
      LfpProblem::from_normalized(std::move(a), std::move(b), std::move(kinds)),
      std::move(xhat)};
}

Eigen::VectorXd nullspace_unit_vector_from(const Eigen::MatrixXd& a,
                                           const Eigen::VectorXd& v0) {
  const Eigen::Index rows = a.rows();
  const Eigen::Index n = a.cols();
  if (rows <= n) {
    throw std::invalid_argument("nullspace_unit_vector: need M > n");
  }
  if (v0.size() != rows) {
    throw std::invalid_argument("nullspace_unit_vector: v0 has wrong size");
  }
  // CG on A^T A y = A^T v0.
  Eigen::VectorXd y = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd r = a.transpose() * v0;
  const double rhs_norm = r.norm();
  Eigen::VectorXd p = r;
  double r_sq = r.squaredNorm();
  const double tol = 1e-12 * rhs_norm;
  const long cap = 10 * n;
  for (long it = 0; it < cap && std::sqrt(r_sq) > tol; ++it) {
    const Eigen::VectorXd ap = a.transpose() * (a * p);
    const double denom = p.dot(ap);
    if (denom <= 0.0) break;  // numerically singular normal equations
    const double step = r_sq / denom;
    y += step * p;
    r -= step * ap;
    const double r_sq_next = r.squaredNorm();
    p = r + (r_sq_next / r_sq) * p;
    r_sq = r_sq_next;
  }
  Eigen::VectorXd residual = v0 - a * y;
  const double res_norm = residual.norm();
  if (res_norm < 1e-12) {
    throw std::runtime_error("nullspace_unit_vector: degenerate residual");
  }
  residual /= res_norm;
  if ((a.transpose() * residual).norm() > 1e-8) {
    throw std::runtime_error("nullspace_unit_vector: rank-deficient matrix");
  }
  return residual;
}

Eigen::VectorXd nullspace_unit_vector(const Eigen::MatrixXd& a, SplitMix64& rng) {
  std::string last_error;
  for (int attempt = 0; attempt < 5; ++attempt) {
    Eigen::VectorXd v0(a.rows());
    for (Eigen::Index i = 0; i < v0.size(); ++i) v0[i] = rng.gaussian();
    try {
      return nullspace_unit_vector_from(a, v0);
    } catch (const std::runtime_error& err) {
      last_error = err.what();
    }
  }
  throw std::runtime_error("nullspace_unit_vector: failed after 5 attempts: " +
                           last_error);
}

SfpInstance gen_sfp(const SfpSpec& spec) {
  if (spec.blocks < 1 || spec.n < 1 || spec.xi < 1 ||
      spec.total_rows != spec.blocks * spec.xi) {
    throw std::invalid_argument("gen_sfp: need M = blocks * xi with all >= 1");
  }
  if (spec.s < 1 || spec.s > spec.n) {
    throw std::invalid_argument("gen_sfp: need 1 <= s <= n");
  }
  if (spec.sigma < 0.0) {
    throw std::invalid_argument("gen_sfp: sigma must be >= 0");
  }
  if (!spec.consistent && spec.total_rows <= spec.n) {
    throw std::invalid_argument(
        "gen_sfp: inconsistent construction needs M > n");
  }

  SplitMix64 rng(spec.seed);
  Eigen::MatrixXd a(spec.total_rows, spec.n);
  for (int i = 0; i < spec.total_rows; ++i) {
    for (int j = 0; j < spec.n; ++j) a(i, j) = rng.gaussian();
  }
  Eigen::VectorXd xhat = sparse_gaussian(rng, spec.n, spec.s);

  std::vector<SfpBlock> blocks(spec.blocks);
  Eigen::VectorXd b(spec.total_rows);
  for (int i = 0; i < spec.blocks; ++i) {
    blocks[i].a = a.middleRows(static_cast<Eigen::Index>(i) * spec.xi, spec.xi);
    // b from the block's own matvec so f_i(xhat) reproduces it bit-exactly.
    b.segment(static_cast<Eigen::Index>(i) * spec.xi, spec.xi) =
        blocks[i].a * xhat;
  }

  if (spec.consistent) {
    // Each block sees a perturbation with entries +-sigma, so its residual
    // norm at xhat is sqrt(xi) sigma up to roundoff. The shared radius is the
    // largest evaluated residual norm, which keeps f_i(xhat) = 0 exact for
    // every block while staying within ~1e-13 of sqrt(xi) sigma.
    for (int i = 0; i < spec.blocks; ++i) {
      Eigen::VectorXd signs(spec.xi);
      for (int r = 0; r < spec.xi; ++r) {
        signs[r] = rng.gaussian() >= 0.0 ? 1.0 : -1.0;
      }
      blocks[i].center =
          b.segment(static_cast<Eigen::Index>(i) * spec.xi, spec.xi) +
          spec.sigma * signs;
    }
    double radius = 0.0;
    for (int i = 0; i < spec.blocks; ++i) {
      const Eigen::VectorXd diff = blocks[i].a * xhat - blocks[i].center;
      radius = std::max(radius, diff.norm());
    }
    for (int i = 0; i < spec.blocks; ++i) blocks[i].radius = radius;
    SfpProblem problem(std::move(blocks));
    problem.set_clean_rhs(b);
    return SfpInstance{std::move(problem), std::move(xhat), std::move(b)};
  }

  const Eigen::VectorXd v = nullspace_unit_vector(a, rng);
  const double shift = spec.sigma * std::sqrt(static_cast<double>(spec.total_rows));
  const Eigen::VectorXd b_sigma = b + shift * v;
  const double radius = std::sqrt(static_cast<double>(spec.xi)) * spec.sigma / 2.0;
  for (int i = 0; i < spec.blocks; ++i) {
    blocks[i].center = b_sigma.segment(static_cast<Eigen::Index>(i) * spec.xi, spec.xi);
    blocks[i].radius = radius;
  }
  // Infeasibility certificate: dist(b^s, range(A)) = sigma sqrt(M) exceeds
  // sqrt(m) r = sigma sqrt(M) / 2.
  const double gap = shift - std::sqrt(static_cast<double>(spec.blocks)) * radius;
  if (spec.sigma > 0.0 && gap < shift / 2.0 - 1e-8) {
    throw std::runtime_error("gen_sfp: inconsistency certificate failed");
  }
  SfpProblem problem(std::move(blocks));
  problem.set_clean_rhs(b);
  return SfpInstance{std::move(problem), std::move(xhat), std::move(b)};
}

}  // namespace sbbp
