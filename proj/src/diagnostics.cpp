#include "sbbp/diagnostics.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace sbbp {

double eta_constant(const Eigen::MatrixXd& a, const Eigen::VectorXd& xhat,
                    double lambda) {
  const int n = static_cast<int>(a.cols());
  if (n < 1 || n > 12) {
    throw std::invalid_argument(
        "eta_constant: column count must lie in [1, 12] (2^n - 1 supports)");
  }
  if (xhat.size() != n || xhat.isZero(0.0)) {
    throw std::invalid_argument("eta_constant: xhat must be nonzero of size n");
  }
  if (!(lambda >= 0.0)) {
    throw std::invalid_argument("eta_constant: lambda must be >= 0");
  }

  double sigma_min = std::numeric_limits<double>::infinity();
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    Eigen::MatrixXd sub(a.rows(), __builtin_popcount(mask));
    int at = 0;
    for (int j = 0; j < n; ++j) {
      if (mask & (1u << j)) sub.col(at++) = a.col(j);
    }
    if (sub.isZero(0.0)) continue;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(sub);
    sigma_min = std::min(sigma_min, svd.singularValues().minCoeff());
  }
  if (!std::isfinite(sigma_min)) {
    throw std::invalid_argument("eta_constant: all column submatrices are zero");
  }

  double xmin = std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < xhat.size(); ++j) {
    if (xhat[j] != 0.0) xmin = std::min(xmin, std::abs(xhat[j]));
  }
  return sigma_min * sigma_min * xmin / (xmin + 2.0 * lambda);
}

double bdgc_witness_check(const LfpProblem& problem, const RunRecord& record,
                          const Eigen::VectorXd& xhat, double eta) {
  for (ConstraintKind kind : problem.kinds()) {
    if (kind != ConstraintKind::Equality) {
      throw std::invalid_argument("bdgc_witness_check: equality rows only");
    }
  }
  if (record.iterates.empty()) {
    throw std::invalid_argument("bdgc_witness_check: run has no stored iterates");
  }
  (void)eta;
  double worst = std::numeric_limits<double>::infinity();
  for (const IterateState& it : record.iterates) {
    const double dist = bregman_distance(record.kernel, it.x, it.x_star, xhat);
    if (dist <= 1e-10) continue;  // converged point; the ratio is 0/0 noise
    const double resid_sq =
        (problem.matrix() * it.x - problem.rhs()).squaredNorm();
    worst = std::min(worst, resid_sq / dist);
  }
  return worst;
}

bool adaptivity_condition(double c, double gamma_b, int tau, int m) {
  return c * gamma_b >= tau / (12.0 * std::log(1.0 + m));
}

namespace {

template <typename ProblemT>
InnerOptimum oracle_impl(const ProblemT& problem, long iters) {
  const int m = problem.num_constraints();
  const double step = 1.0 / lipschitz_max(problem);
  const MiniBatch batch = full_batch(m);

  InnerOptimum best;
  best.x_bar = Eigen::VectorXd::Zero(problem.dim());
  best.f_bar = std::numeric_limits<double>::infinity();
  double best_at_half = std::numeric_limits<double>::infinity();

  Eigen::VectorXd x = Eigen::VectorXd::Zero(problem.dim());
  for (long it = 0; it <= iters; ++it) {
    const BatchStats stats = batch_eval(problem, batch, x);
    if (stats.value < best.f_bar) {
      best.f_bar = stats.value;
      best.x_bar = x;
    }
    if (it == iters / 2) best_at_half = best.f_bar;
    if (it == iters) break;
    x -= step * stats.grad;
  }
  best.stationary = best_at_half - best.f_bar <= 1e-8;
  return best;
}

template <typename ProblemT>
TheoryAudit audit_impl(const RunRecord& record, const SolverConfig& config,
                       const ProblemT& problem, const Eigen::VectorXd* xhat) {
  TheoryAudit audit;
  const double mu = config.kernel.mu();
  const double l_max = lipschitz_max(problem);

  auto note_violation = [&](double violation, long k, bool& flag, double tol) {
    if (violation > audit.worst_violation) {
      audit.worst_violation = violation;
      audit.worst_iteration = k;
    }
    if (violation > tol) flag = false;
  };

  for (const RecordRow& row : record.rows) {
    if (!std::isnan(row.l_adapt)) {
      audit.max_l_adapt = std::max(audit.max_l_adapt, row.l_adapt);
    }
  }

  if (config.rule.kind == StepsizeKind::DecmSps) {
    const DecmSpsState schedule(config.rule.c, config.rule.gamma_b,
                                config.rule.schedule);
    const double ratio_cap = config.rule.gamma_b / schedule.lambda_at(0);
    const double l_tilde = std::min(mu / (2.0 * l_max), ratio_cap);
    double prev_t = std::numeric_limits<double>::infinity();
    for (const RecordRow& row : record.rows) {
      if (row.skipped || std::isnan(row.t)) continue;
      const double lambda_k = schedule.lambda_at(row.k);
      const double lower = lambda_k * l_tilde;
      const double upper = ratio_cap * lambda_k;
      const double slack = 1e-12 * std::max(1.0, upper);
      note_violation(lower - row.t, row.k, audit.stepsize_bounds_ok, slack);
      note_violation(row.t - upper, row.k, audit.stepsize_bounds_ok, slack);
      note_violation(row.t - prev_t, row.k, audit.stepsize_bounds_ok, slack);
      prev_t = row.t;
    }
  }

  const bool projective = config.rule.kind == StepsizeKind::ExactProjective ||
                          config.rule.kind == StepsizeKind::BlockAdaptive;
  if (projective && xhat != nullptr) {
    for (std::size_t i = 0; i + 1 < record.rows.size(); ++i) {
      const RecordRow& here = record.rows[i];
      const RecordRow& next = record.rows[i + 1];
      if (next.k != here.k + 1) continue;  // needs record_every == 1
      if (std::isnan(here.bregman_dist) || std::isnan(next.bregman_dist)) continue;
      double decrement = 0.0;
      if (!here.skipped && !std::isnan(here.t) && here.l_adapt > 0.0) {
        const double weighted_sq =
            here.batch_grad_norm * here.batch_grad_norm / here.l_adapt;
        decrement = (here.t / l_max -
                     here.t * here.t * here.l_adapt / (2.0 * mu)) *
                    weighted_sq;
      }
      const double violation =
          next.bregman_dist - (here.bregman_dist - decrement);
      note_violation(violation, here.k, audit.descent_ok, 1e-8);
    }
  }
  return audit;
}

}  // namespace

InnerOptimum inner_optimum_oracle(const LfpProblem& problem, long iters) {
  return oracle_impl(problem, iters);
}

InnerOptimum inner_optimum_oracle(const SfpProblem& problem, long iters) {
  return oracle_impl(problem, iters);
}

TheoryAudit audit_run(const RunRecord& record, const SolverConfig& config,
                      const LfpProblem& problem, const Eigen::VectorXd* xhat) {
  return audit_impl(record, config, problem, xhat);
}

TheoryAudit audit_run(const RunRecord& record, const SolverConfig& config,
                      const SfpProblem& problem, const Eigen::VectorXd* xhat) {
  return audit_impl(record, config, problem, xhat);
}

void append_audit_comment(std::ostream& out, const TheoryAudit& audit) {
  out << "# audit: stepsize_bounds_ok=" << (audit.stepsize_bounds_ok ? 1 : 0)
      << " descent_ok=" << (audit.descent_ok ? 1 : 0)
      << " max_l_adapt=" << audit.max_l_adapt
      << " worst_violation=" << audit.worst_violation
      << " worst_iteration=" << audit.worst_iteration << '\n';
}

}  // namespace sbbp
