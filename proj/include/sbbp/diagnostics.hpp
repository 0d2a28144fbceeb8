#pragma once

#include <Eigen/Core>
#include <iosfwd>

#include "sbbp/deviation.hpp"
#include "sbbp/solver.hpp"

namespace sbbp {

// Outcome of the theory audits over a run trace. The stepsize bounds are
// checked on DecmSPS runs; the per-step descent inequality on projective runs
// recorded every iteration with a known feasible point.
struct TheoryAudit {
  bool stepsize_bounds_ok = true;
  bool descent_ok = true;
  double max_l_adapt = 0.0;
  double worst_violation = 0.0;
  long worst_iteration = -1;
};

// Growth constant eta = sigma~_min(A)^2 |xhat|_min / (|xhat|_min + 2 lambda),
// where sigma~_min minimizes sigma_min over all nonzero column submatrices.
// Gated to n <= 12 columns (2^n - 1 SVDs).
double eta_constant(const Eigen::MatrixXd& a, const Eigen::VectorXd& xhat,
                    double lambda);

// Smallest ratio ||A x_k - b||^2 / D(x_k, xhat) over stored iterates of an
// equality-only run started from a zero dual (converged points skipped).
double bdgc_witness_check(const LfpProblem& problem, const RunRecord& run,
                          const Eigen::VectorXd& xhat, double eta);

// c * gamma_b >= tau / (12 log(1+m)), inclusive.
bool adaptivity_condition(double c, double gamma_b, int tau, int m);

// Reference minimizer of F by full-batch gradient descent with step 1/L_max
// from x = 0; returns the best value seen. `stationary` reports whether the
// value moved less than 1e-8 over the second half of the budget.
struct InnerOptimum {
  double f_bar = 0.0;
  Eigen::VectorXd x_bar;
  bool stationary = false;
};

InnerOptimum inner_optimum_oracle(const LfpProblem& problem,
                                  long iters = 100000);
InnerOptimum inner_optimum_oracle(const SfpProblem& problem,
                                  long iters = 100000);

TheoryAudit audit_run(const RunRecord& record, const SolverConfig& config,
                      const LfpProblem& problem,
                      const Eigen::VectorXd* xhat = nullptr);
TheoryAudit audit_run(const RunRecord& record, const SolverConfig& config,
                      const SfpProblem& problem,
                      const Eigen::VectorXd* xhat = nullptr);

// Appends a "# audit:" comment block, e.g. after write_run_csv output.
void append_audit_comment(std::ostream& out, const TheoryAudit& audit);

}  // namespace sbbp
