#pragma once

#include <Eigen/Core>
#include <iosfwd>
#include <optional>
#include <variant>
#include <vector>

namespace sbbp {

using RowMajorMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class ConstraintKind : char { Equality, Inequality };

// Linear feasibility problem: find x with A_I x = b_I, A_J x <= b_J.
// Rows are stored with unit Euclidean norm, so every per-row deviation
// function has gradient Lipschitz constant 1.
class LfpProblem {
 public:
  enum class RowPolicy { Rescale, Reject };

  LfpProblem(RowMajorMatrix a, Eigen::VectorXd b,
             std::vector<ConstraintKind> kinds,
             RowPolicy policy = RowPolicy::Rescale);

  // Accepts rows that are already unit norm (within 1e-10) without touching
  // them, preserving bit-exact feasibility certificates from generators.
  static LfpProblem from_normalized(RowMajorMatrix a, Eigen::VectorXd b,
                                    std::vector<ConstraintKind> kinds);

  int num_constraints() const { return static_cast<int>(a_.rows()); }
  int dim() const { return static_cast<int>(a_.cols()); }
  const RowMajorMatrix& matrix() const { return a_; }
  const Eigen::VectorXd& rhs() const { return b_; }
  const std::vector<ConstraintKind>& kinds() const { return kinds_; }

 private:
  struct Trusted {};
  LfpProblem(Trusted, RowMajorMatrix a, Eigen::VectorXd b,
             std::vector<ConstraintKind> kinds);

  RowMajorMatrix a_;
  Eigen::VectorXd b_;
  std::vector<ConstraintKind> kinds_;
};

// One block constraint of a split feasibility problem: A_i x in Q_i where
// Q_i is the ball of the given radius around the center.
struct SfpBlock {
  Eigen::MatrixXd a;
  Eigen::VectorXd center;
  double radius = 0.0;
};

class SfpProblem {
 public:
  explicit SfpProblem(std::vector<SfpBlock> blocks);

  int num_constraints() const { return static_cast<int>(blocks_.size()); }
  int dim() const { return static_cast<int>(blocks_.front().a.cols()); }
  const SfpBlock& block(int i) const { return blocks_.at(i); }
  double lipschitz(int i) const { return lipschitz_.at(i); }
  const std::vector<double>& lipschitz_constants() const { return lipschitz_; }

  // Unperturbed right-hand side b (set by generators); enables the relative
  // residual ||Ax - b|| / ||b||.
  void set_clean_rhs(Eigen::VectorXd b) { clean_b_ = std::move(b); }
  const std::optional<Eigen::VectorXd>& clean_rhs() const { return clean_b_; }

 private:
  std::vector<SfpBlock> blocks_;
  std::vector<double> lipschitz_;
  std::optional<Eigen::VectorXd> clean_b_;
};

// A sampled index set J with positive weights summing to one.
struct MiniBatch {
  std::vector<int> indices;
  std::vector<double> weights;

  void validate(int m) const;  // throws std::invalid_argument on violation
};

// One-pass aggregate over a mini-batch at a point x.
struct BatchStats {
  double value = 0.0;                 // sum_i w_i f_i(x)
  Eigen::VectorXd grad;               // sum_i w_i grad f_i(x)
  double weighted_sq = 0.0;           // sum_i w_i ||grad f_i(x)||^2
  double lipschitz_weighted_sq = 0.0; // sum_i (w_i / L_i) ||grad f_i(x)||^2
  double lower_bound = 0.0;           // l*_J; zero for both families
};

// The map e: identity on equality indices, positive part on inequality ones.
Eigen::VectorXd residual_map_e(const std::vector<ConstraintKind>& kinds,
                               const Eigen::VectorXd& r);

double f_value(const LfpProblem& problem, int i, const Eigen::VectorXd& x);
double f_value(const SfpProblem& problem, int i, const Eigen::VectorXd& x);
Eigen::VectorXd f_grad(const LfpProblem& problem, int i,
                       const Eigen::VectorXd& x);
Eigen::VectorXd f_grad(const SfpProblem& problem, int i,
                       const Eigen::VectorXd& x);

// Euclidean projection onto the ball of the given radius around center.
Eigen::VectorXd ball_project(const Eigen::VectorXd& center, double radius,
                             const Eigen::VectorXd& y);

BatchStats batch_eval(const LfpProblem& problem, const MiniBatch& batch,
                      const Eigen::VectorXd& x);
BatchStats batch_eval(const SfpProblem& problem, const MiniBatch& batch,
                      const Eigen::VectorXd& x);

double lipschitz_max(const LfpProblem& problem);
double lipschitz_max(const SfpProblem& problem);

// All indices with uniform weights 1/m.
MiniBatch full_batch(int m);

// F(x) = (1/m) sum_i f_i(x), the uniform-weight proximity function.
double proximity_value(const LfpProblem& problem, const Eigen::VectorXd& x);
double proximity_value(const SfpProblem& problem, const Eigen::VectorXd& x);

// Plain-text serialization; decimals carry 17 significant digits so values
// round-trip exactly. See README for the format.
void save_problem(std::ostream& out, const LfpProblem& problem);
void save_problem(std::ostream& out, const SfpProblem& problem);

using AnyProblem = std::variant<LfpProblem, SfpProblem>;
AnyProblem load_problem(std::istream& in);

}  // namespace sbbp
