#include "sbbp/solver.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

namespace sbbp {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

template <typename ProblemT>
StepInfo step_impl(IterateState& state, const ProblemT& problem,
                   const MiniBatch& batch, StepsizeEngine& engine,
                   const Kernel& kernel, long k) {
  StepInfo info;
  info.stats = batch_eval(problem, batch, state.x);
  const double grad_sq = info.stats.grad.squaredNorm();
  if (grad_sq == 0.0) {
    info.skipped = true;
    info.t = kNaN;
    info.l_adapt = kNaN;
    return info;
  }
  info.l_adapt = grad_sq / info.stats.weighted_sq;
  info.t = engine.next(info.stats, state.x, state.x_star, kernel, k);
  state.x_star -= info.t * info.stats.grad;
  if (!state.x_star.allFinite()) {
    throw std::runtime_error("sbbp_step: non-finite dual iterate at iteration " +
                             std::to_string(k));
  }
  state.x = grad_conj(kernel, state.x_star);
  return info;
}

template <typename ProblemT>
double residual_metric(const ProblemT& problem, const Eigen::VectorXd& x) {
  return positive_residual(problem, x);
}

double rel_residual_metric(const LfpProblem&, const Eigen::VectorXd&) {
  return kNaN;
}

double rel_residual_metric(const SfpProblem& problem, const Eigen::VectorXd& x) {
  const auto value = relative_residual(problem, x);
  return value ? *value : kNaN;
}

template <typename ProblemT>
RunRecord run_impl(const SolverConfig& config, const ProblemT& problem,
                   const Eigen::VectorXd* reference) {
  if (config.max_iters < 1) {
    throw std::invalid_argument("run: max_iters must be >= 1");
  }
  if (config.tol_rel_err < 0.0 || config.tol_batch_grad < 0.0) {
    throw std::invalid_argument("run: tolerances must be >= 0");
  }
  if (config.record_every < 1) {
    throw std::invalid_argument("run: record_every must be >= 1");
  }
  if (reference != nullptr) {
    if (reference->size() != problem.dim()) {
      throw std::invalid_argument("run: reference dimension mismatch");
    }
    if (reference->norm() == 0.0) {
      throw std::invalid_argument("run: reference must be nonzero");
    }
  }

  const int m = problem.num_constraints();
  const double l_max = lipschitz_max(problem);
  Sampler sampler(config.sampler, m);
  StepsizeEngine engine(config.rule, config.kernel.mu(), l_max);

  RunRecord record;
  record.kernel = config.kernel;
  if (config.rule.kind == StepsizeKind::DecmSps) {
    // Corollary-style adaptivity guard c*gamma_b >= tau / (12 log(1+m));
    // reported as a warning, never an error.
    record.adaptivity_warning =
        config.rule.c * config.rule.gamma_b <
        config.sampler.tau / (12.0 * std::log(1.0 + m));
  }

  IterateState state = IterateState::zeros(problem.dim());

  auto make_row = [&](long k, const IterateState& at) {
    RecordRow row;
    row.k = k;
    row.t = kNaN;
    row.batch_value = kNaN;
    row.batch_grad_norm = kNaN;
    row.l_adapt = kNaN;
    row.rel_error = reference ? rel_error(at.x, *reference) : kNaN;
    row.residual = residual_metric(problem, at.x);
    row.bregman_dist =
        reference ? bregman_distance(config.kernel, at.x, at.x_star, *reference)
                  : kNaN;
    row.rel_residual = rel_residual_metric(problem, at.x);
    return row;
  };
  auto push_row = [&](RecordRow row, const IterateState& at) {
    record.rows.push_back(std::move(row));
    if (config.store_iterates) record.iterates.push_back(at);
  };

  long k = 0;
  for (; k < config.max_iters; ++k) {
    const MiniBatch batch = sampler.next();
    const bool record_now = (k % config.record_every == 0);
    RecordRow row;
    IterateState snapshot;
    if (record_now) {
      row = make_row(k, state);
      if (config.store_iterates) snapshot = state;
    }

    const StepInfo info = sbbp_step(state, problem, batch, engine, config.kernel, k);
    if (info.skipped) ++record.skipped_steps;
    if (!info.skipped && info.l_adapt > record.max_l_adapt) {
      record.max_l_adapt = info.l_adapt;
    }
    if (record_now) {
      row.t = info.t;
      row.batch_value = info.stats.value;
      row.batch_grad_norm = std::sqrt(info.stats.grad.squaredNorm());
      row.l_adapt = info.l_adapt;
      row.skipped = info.skipped;
      record.rows.push_back(row);
      if (config.store_iterates) record.iterates.push_back(std::move(snapshot));
    }

    const long used = k + 1;
    if (reference && rel_error(state.x, *reference) <= config.tol_rel_err) {
      record.stop_reason = StopReason::RelErr;
      record.iterations_used = used;
      break;
    }
    if (std::sqrt(info.stats.grad.squaredNorm()) <= config.tol_batch_grad) {
      record.stop_reason = StopReason::BatchGrad;
      record.iterations_used = used;
      break;
    }
    if (used == config.max_iters) {
      record.stop_reason = StopReason::MaxIters;
      record.iterations_used = used;
      break;
    }
  }

  push_row(make_row(record.iterations_used, state), state);
  record.final_state = std::move(state);
  return record;
}

std::string csv_field(double v) {
  if (std::isnan(v)) return std::string();
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

StepInfo sbbp_step(IterateState& state, const LfpProblem& problem,
                   const MiniBatch& batch, StepsizeEngine& engine,
                   const Kernel& kernel, long k) {
  return step_impl(state, problem, batch, engine, kernel, k);
}

StepInfo sbbp_step(IterateState& state, const SfpProblem& problem,
                   const MiniBatch& batch, StepsizeEngine& engine,
                   const Kernel& kernel, long k) {
  return step_impl(state, problem, batch, engine, kernel, k);
}

RunRecord run(const SolverConfig& config, const LfpProblem& problem,
              const Eigen::VectorXd* reference) {
  return run_impl(config, problem, reference);
}

RunRecord run(const SolverConfig& config, const SfpProblem& problem,
              const Eigen::VectorXd* reference) {
  return run_impl(config, problem, reference);
}

double rel_error(const Eigen::VectorXd& x, const Eigen::VectorXd& reference) {
  const double ref_norm = reference.norm();
  if (ref_norm == 0.0) {
    throw std::invalid_argument("rel_error: zero reference");
  }
  return (x - reference).norm() / ref_norm;
}

double positive_residual(const LfpProblem& problem, const Eigen::VectorXd& x) {
  const Eigen::VectorXd r = problem.matrix() * x - problem.rhs();
  return residual_map_e(problem.kinds(), r).norm();
}

double positive_residual(const SfpProblem& problem, const Eigen::VectorXd& x) {
  double sum = 0.0;
  for (int i = 0; i < problem.num_constraints(); ++i) {
    sum += 2.0 * f_value(problem, i, x);  // dist^2
  }
  return std::sqrt(sum);
}

std::optional<double> relative_residual(const SfpProblem& problem,
                                        const Eigen::VectorXd& x) {
  if (!problem.clean_rhs()) return std::nullopt;
  const Eigen::VectorXd& b = *problem.clean_rhs();
  double sum = 0.0;
  Eigen::Index at = 0;
  for (int i = 0; i < problem.num_constraints(); ++i) {
    const SfpBlock& blk = problem.block(i);
    sum += (blk.a * x - b.segment(at, blk.a.rows())).squaredNorm();
    at += blk.a.rows();
  }
  return std::sqrt(sum) / b.norm();
}

void write_run_csv(std::ostream& out, const RunRecord& record) {
  out << "k,t,batch_value,batch_grad_norm,l_adapt,rel_error,residual,bregman_dist\n";
  for (const RecordRow& row : record.rows) {
    out << row.k << ',' << csv_field(row.t) << ',' << csv_field(row.batch_value)
        << ',' << csv_field(row.batch_grad_norm) << ',' << csv_field(row.l_adapt)
        << ',' << csv_field(row.rel_error) << ',' << csv_field(row.residual)
        << ',' << csv_field(row.bregman_dist) << '\n';
  }
}

}  // namespace sbbp
