#pragma once

#include <Eigen/Core>
#include <iosfwd>
#include <optional>
#include <vector>

#include "sbbp/deviation.hpp"
#include "sbbp/kernel.hpp"
#include "sbbp/sampling.hpp"
#include "sbbp/stepsize.hpp"

namespace sbbp {

struct SolverConfig {
  Kernel kernel = Kernel::euclidean();
  StepsizeRule rule;
  SamplerConfig sampler;
  long max_iters = 20000;
  double tol_rel_err = 1e-10;   // only used when a reference is supplied
  double tol_batch_grad = 0.0;  // ||grad f_J(x_k)|| <= tol stops the run
  long record_every = 10;
  bool store_iterates = false;  // keep (x, x*) snapshots beside each row
};

enum class StopReason { MaxIters, RelErr, BatchGrad };

// Metrics at iterate x_k plus the step taken there. NaN marks an unavailable
// field (no reference, or a skipped/absent step). The final row carries the
// terminal iterate and no step fields.
struct RecordRow {
  long k = 0;
  double t = 0.0;
  double batch_value = 0.0;
  double batch_grad_norm = 0.0;
  double l_adapt = 0.0;
  double rel_error = 0.0;
  double residual = 0.0;
  double bregman_dist = 0.0;
  double rel_residual = 0.0;
  bool skipped = false;
};

struct RunRecord {
  std::vector<RecordRow> rows;
  IterateState final_state;
  long iterations_used = 0;
  StopReason stop_reason = StopReason::MaxIters;
  Kernel kernel = Kernel::euclidean();
  double max_l_adapt = 0.0;
  long skipped_steps = 0;
  bool adaptivity_warning = false;
  std::vector<IterateState> iterates;  // aligned with rows when stored
};

struct StepInfo {
  bool skipped = false;
  double t = 0.0;
  double l_adapt = 0.0;
  BatchStats stats;
};

// One SBBP update: x*_{k+1} = x*_k - t_k sum w_i grad f_i(x_k), then
// x_{k+1} = grad psi*(x*_{k+1}). A zero batch gradient skips the update and
// leaves both the iterate and the stepsize state untouched.
StepInfo sbbp_step(IterateState& state, const LfpProblem& problem,
                   const MiniBatch& batch, StepsizeEngine& engine,
                   const Kernel& kernel, long k);
StepInfo sbbp_step(IterateState& state, const SfpProblem& problem,
                   const MiniBatch& batch, StepsizeEngine& engine,
                   const Kernel& kernel, long k);

// Full run from x_0 = x*_0 = 0. Stopping priority: relative error against the
// reference (when given), then the mini-batch gradient norm, then max_iters.
RunRecord run(const SolverConfig& config, const LfpProblem& problem,
              const Eigen::VectorXd* reference = nullptr);
RunRecord run(const SolverConfig& config, const SfpProblem& problem,
              const Eigen::VectorXd* reference = nullptr);

// ||x - reference|| / ||reference||; the reference must be nonzero.
double rel_error(const Eigen::VectorXd& x, const Eigen::VectorXd& reference);

// LFP: ||e(Ax - b)||. SFP: norm of the vector of block distances to Q_i.
double positive_residual(const LfpProblem& problem, const Eigen::VectorXd& x);
double positive_residual(const SfpProblem& problem, const Eigen::VectorXd& x);

// ||Ax - b|| / ||b|| against the stored unperturbed rhs, when available.
std::optional<double> relative_residual(const SfpProblem& problem,
                                        const Eigen::VectorXd& x);

// CSV with header k,t,batch_value,batch_grad_norm,l_adapt,rel_error,residual,
// bregman_dist; 17 significant digits; empty fields where unavailable.
void write_run_csv(std::ostream& out, const RunRecord& record);

}  // namespace sbbp
