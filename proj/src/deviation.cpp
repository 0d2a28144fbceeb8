#include "sbbp/deviation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

#include "sbbp/sampling.hpp"

namespace sbbp {

namespace {

constexpr double kUnitRowTol = 1e-10;

void check_lfp_shapes(const RowMajorMatrix& a, const Eigen::VectorXd& b,
                      const std::vector<ConstraintKind>& kinds) {
  if (a.rows() == 0 || a.cols() == 0) {
    throw std::invalid_argument("LfpProblem: empty matrix");
  }
  if (b.size() != a.rows() || static_cast<Eigen::Index>(kinds.size()) != a.rows()) {
    throw std::invalid_argument("LfpProblem: inconsistent sizes of A, b, kinds");
  }
}

// 17 significant digits: enough to reproduce any double exactly.
std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double read_double(std::istream& in, const char* what) {
  double v;
  if (!(in >> v)) {
    throw std::runtime_error(std::string("load_problem: expected number for ") + what);
  }
  return v;
}

long read_count(std::istream& in, const char* what) {
  long v;
  if (!(in >> v) || v < 1) {
    throw std::runtime_error(std::string("load_problem: expected positive count for ") + what);
  }
  return v;
}

}  // namespace

LfpProblem::LfpProblem(Trusted, RowMajorMatrix a, Eigen::VectorXd b,
                       std::vector<ConstraintKind> kinds)
    : a_(std::move(a)), b_(std::move(b)), kinds_(std::move(kinds)) {}

LfpProblem::LfpProblem(RowMajorMatrix a, Eigen::VectorXd b,
                       std::vector<ConstraintKind> kinds, RowPolicy policy)
    : LfpProblem(Trusted{}, std::move(a), std::move(b), std::move(kinds)) {
  check_lfp_shapes(a_, b_, kinds_);
  for (Eigen::Index i = 0; i < a_.rows(); ++i) {
    const double norm = a_.row(i).norm();
    if (norm == 0.0) {
      throw std::invalid_argument("LfpProblem: zero row " + std::to_string(i));
    }
    if (std::abs(norm - 1.0) <= kUnitRowTol) continue;
    if (policy == RowPolicy::Reject) {
      throw std::invalid_argument("LfpProblem: row " + std::to_string(i) +
                                  " is not unit norm");
    }
    a_.row(i) /= norm;
    b_[i] /= norm;
  }
}

LfpProblem LfpProblem::from_normalized(RowMajorMatrix a, Eigen::VectorXd b,
                                       std::vector<ConstraintKind> kinds) {
  check_lfp_shapes(a, b, kinds);
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    if (std::abs(a.row(i).norm() - 1.0) > kUnitRowTol) {
      throw std::invalid_argument("from_normalized: row " + std::to_string(i) +
                                  " is not unit norm");
    }
  }
  return LfpProblem(Trusted{}, std::move(a), std::move(b), std::move(kinds));
}

SfpProblem::SfpProblem(std::vector<SfpBlock> blocks) : blocks_(std::move(blocks)) {
  if (blocks_.empty()) throw std::invalid_argument("SfpProblem: no blocks");
  const Eigen::Index n = blocks_.front().a.cols();
  lipschitz_.reserve(blocks_.size());
  for (const SfpBlock& blk : blocks_) {
    if (blk.a.cols() != n) {
      throw std::invalid_argument("SfpProblem: blocks disagree on column count");
    }
    if (blk.center.size() != blk.a.rows()) {
      throw std::invalid_argument("SfpProblem: center size does not match block rows");
    }
    if (!(blk.radius >= 0.0)) {
      throw std::invalid_argument("SfpProblem: negative radius");
    }
    lipschitz_.push_back(spectral_norm_sq(blk.a));
  }
}

void MiniBatch::validate(int m) const {
  if (indices.empty() || indices.size() != weights.size()) {
    throw std::invalid_argument("MiniBatch: indices/weights size mismatch or empty");
  }
  double sum = 0.0;
  for (std::size_t j = 0; j < indices.size(); ++j) {
    if (indices[j] < 0 || indices[j] >= m) {
      throw std::invalid_argument("MiniBatch: index out of range");
    }
    if (!(weights[j] > 0.0)) {
      throw std::invalid_argument("MiniBatch: nonpositive weight");
    }
    sum += weights[j];
  }
  std::vector<int> sorted = indices;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw std::invalid_argument("MiniBatch: duplicate index");
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    throw std::invalid_argument("MiniBatch: weights do not sum to one");
  }
}

Eigen::VectorXd residual_map_e(const std::vector<ConstraintKind>& kinds,
                               const Eigen::VectorXd& r) {
  if (static_cast<Eigen::Index>(kinds.size()) != r.size()) {
    throw std::invalid_argument("residual_map_e: size mismatch");
  }
  Eigen::VectorXd out(r.size());
  for (Eigen::Index i = 0; i < r.size(); ++i) {
    out[i] = kinds[i] == ConstraintKind::Inequality ? std::max(r[i], 0.0) : r[i];
  }
  return out;
}

namespace {

void check_index(int i, int m, const char* fn) {
  if (i < 0 || i >= m) {
    throw std::out_of_range(std::string(fn) + ": constraint index out of range");
  }
}

inline double lfp_deviation(const LfpProblem& p, int i, const Eigen::VectorXd& x) {
  const double r = p.matrix().row(i).dot(x) - p.rhs()[i];
  return p.kinds()[i] == ConstraintKind::Inequality ? std::max(r, 0.0) : r;
}

// Residual of A_i x against the ball Q_i, in the factored form
// max{0, 1 - r/||A_i x - c||} (A_i x - c); zero exactly on the ball.
inline Eigen::VectorXd sfp_block_residual(const SfpBlock& blk,
                                          const Eigen::VectorXd& x) {
  Eigen::VectorXd diff = blk.a * x - blk.center;
  const double norm = diff.norm();
  if (norm <= blk.radius) return Eigen::VectorXd::Zero(diff.size());
  diff *= 1.0 - blk.radius / norm;
  return diff;
}

}  // namespace

double f_value(const LfpProblem& problem, int i, const Eigen::VectorXd& x) {
  check_index(i, problem.num_constraints(), "f_value");
  const double e = lfp_deviation(problem, i, x);
  return 0.5 * e * e;
}

double f_value(const SfpProblem& problem, int i, const Eigen::VectorXd& x) {
  check_index(i, problem.num_constraints(), "f_value");
  return 0.5 * sfp_block_residual(problem.block(i), x).squaredNorm();
}

Eigen::VectorXd f_grad(const LfpProblem& problem, int i,
                       const Eigen::VectorXd& x) {
  check_index(i, problem.num_constraints(), "f_grad");
  const double e = lfp_deviation(problem, i, x);
  return e * problem.matrix().row(i).transpose();
}

Eigen::VectorXd f_grad(const SfpProblem& problem, int i,
                       const Eigen::VectorXd& x) {
  check_index(i, problem.num_constraints(), "f_grad");
  const SfpBlock& blk = problem.block(i);
  return blk.a.transpose() * sfp_block_residual(blk, x);
}

Eigen::VectorXd ball_project(const Eigen::VectorXd& center, double radius,
                             const Eigen::VectorXd& y) {
  if (!(radius >= 0.0)) throw std::invalid_argument("ball_project: negative radius");
  if (radius == 0.0) return center;
  const Eigen::VectorXd diff = y - center;
  const double norm = diff.norm();
  if (norm <= radius) return y;
  return center + (radius / norm) * diff;
}

BatchStats batch_eval(const LfpProblem& problem, const MiniBatch& batch,
                      const Eigen::VectorXd& x) {
  batch.validate(problem.num_constraints());
  BatchStats stats;
  stats.grad = Eigen::VectorXd::Zero(problem.dim());
  for (std::size_t j = 0; j < batch.indices.size(); ++j) {
    const int i = batch.indices[j];
    const double w = batch.weights[j];
    const double e = lfp_deviation(problem, i, x);
    const double gsq = e * e;  // rows are unit norm, so ||grad f_i||^2 = e^2
    stats.value += w * 0.5 * gsq;
    stats.weighted_sq += w * gsq;
    stats.lipschitz_weighted_sq += w * gsq;  // L_i = 1
    if (e != 0.0) stats.grad += (w * e) * problem.matrix().row(i).transpose();
  }
  return stats;
}

BatchStats batch_eval(const SfpProblem& problem, const MiniBatch& batch,
                      const Eigen::VectorXd& x) {
  batch.validate(problem.num_constraints());
  BatchStats stats;
  stats.grad = Eigen::VectorXd::Zero(problem.dim());
  for (std::size_t j = 0; j < batch.indices.size(); ++j) {
    const int i = batch.indices[j];
    const double w = batch.weights[j];
    const SfpBlock& blk = problem.block(i);
    const Eigen::VectorXd d = sfp_block_residual(blk, x);
    stats.value += w * 0.5 * d.squaredNorm();
    if (d.isZero(0.0)) continue;
    const Eigen::VectorXd g = blk.a.transpose() * d;
    const double gsq = g.squaredNorm();
    stats.weighted_sq += w * gsq;
    stats.lipschitz_weighted_sq += (w / problem.lipschitz(i)) * gsq;
    stats.grad += w * g;
  }
  return stats;
}

double lipschitz_max(const LfpProblem&) { return 1.0; }

double lipschitz_max(const SfpProblem& problem) {
  return *std::max_element(problem.lipschitz_constants().begin(),
                           problem.lipschitz_constants().end());
}

MiniBatch full_batch(int m) {
  MiniBatch batch;
  batch.indices.resize(m);
  for (int i = 0; i < m; ++i) batch.indices[i] = i;
  batch.weights.assign(m, 1.0 / m);
  return batch;
}

double proximity_value(const LfpProblem& problem, const Eigen::VectorXd& x) {
  return batch_eval(problem, full_batch(problem.num_constraints()), x).value;
}

double proximity_value(const SfpProblem& problem, const Eigen::VectorXd& x) {
  return batch_eval(problem, full_batch(problem.num_constraints()), x).value;
}

void save_problem(std::ostream& out, const LfpProblem& problem) {
  const int m = problem.num_constraints();
  const int n = problem.dim();
  out << "LFP " << m << ' ' << n << '\n';
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      out << (j ? " " : "") << fmt17(problem.matrix()(i, j));
    }
    out << '\n';
  }
  for (int i = 0; i < m; ++i) out << (i ? " " : "") << fmt17(problem.rhs()[i]);
  out << '\n';
  for (int i = 0; i < m; ++i) {
    out << (i ? " " : "")
        << (problem.kinds()[i] == ConstraintKind::Equality ? 'E' : 'I');
  }
  out << '\n';
}

void save_problem(std::ostream& out, const SfpProblem& problem) {
  const int m = problem.num_constraints();
  const int n = problem.dim();
  const Eigen::Index xi = problem.block(0).a.rows();
  for (int i = 0; i < m; ++i) {
    if (problem.block(i).a.rows() != xi) {
      throw std::invalid_argument("save_problem: SFP blocks must share a row count");
    }
  }
  out << "SFP " << m << ' ' << n << ' ' << xi << '\n';
  for (int i = 0; i < m; ++i) {
    const SfpBlock& blk = problem.block(i);
    for (Eigen::Index r = 0; r < xi; ++r) {
      for (int j = 0; j < n; ++j) out << (j ? " " : "") << fmt17(blk.a(r, j));
      out << '\n';
    }
    for (Eigen::Index r = 0; r < xi; ++r) {
      out << (r ? " " : "") << fmt17(blk.center[r]);
    }
    out << '\n' << fmt17(blk.radius) << '\n';
  }
}

AnyProblem load_problem(std::istream& in) {
  std::string tag;
  if (!(in >> tag)) throw std::runtime_error("load_problem: empty input");
  if (tag == "LFP") {
    const long m = read_count(in, "m");
    const long n = read_count(in, "n");
    RowMajorMatrix a(m, n);
    for (long i = 0; i < m; ++i) {
      for (long j = 0; j < n; ++j) a(i, j) = read_double(in, "matrix entry");
    }
    Eigen::VectorXd b(m);
    for (long i = 0; i < m; ++i) b[i] = read_double(in, "rhs entry");
    std::vector<ConstraintKind> kinds(m);
    for (long i = 0; i < m; ++i) {
      std::string kind;
      if (!(in >> kind) || (kind != "E" && kind != "I")) {
        throw std::runtime_error("load_problem: expected kind token E or I");
      }
      kinds[i] = kind == "E" ? ConstraintKind::Equality : ConstraintKind::Inequality;
    }
    return LfpProblem(std::move(a), std::move(b), std::move(kinds));
  }
  if (tag == "SFP") {
    const long m = read_count(in, "m");
    const long n = read_count(in, "n");
    const long xi = read_count(in, "xi");
    std::vector<SfpBlock> blocks(m);
    for (long i = 0; i < m; ++i) {
      blocks[i].a.resize(xi, n);
      for (long r = 0; r < xi; ++r) {
        for (long j = 0; j < n; ++j) {
          blocks[i].a(r, j) = read_double(in, "block entry");
        }
      }
      blocks[i].center.resize(xi);
      for (long r = 0; r < xi; ++r) blocks[i].center[r] = read_double(in, "center");
      blocks[i].radius = read_double(in, "radius");
      if (blocks[i].radius < 0.0) {
        throw std::runtime_error("load_problem: negative radius");
      }
    }
    return SfpProblem(std::move(blocks));
  }
  throw std::runtime_error("load_problem: unknown header tag '" + tag + "'");
}

}  // namespace sbbp
