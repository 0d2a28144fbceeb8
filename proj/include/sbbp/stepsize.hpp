#pragma once

#include <Eigen/Core>

#include "sbbp/deviation.hpp"
#include "sbbp/kernel.hpp"

namespace sbbp {

enum class Schedule { Constant, InvSqrt };

// State of the decreasing mirror stochastic Polyak stepsize. The schedule is
// lambda_k = 1/c (Constant) or 1/(c sqrt(k+1)) (InvSqrt); the running ratio
// t_k / lambda_k is capped by its own past, so it never increases. The cap
// starts at gamma_b / lambda_0.
struct DecmSpsState {
  double c = 0.2;
  double gamma_b = 100.0;
  Schedule schedule = Schedule::Constant;
  double prev_t_over_lambda = 0.0;

  DecmSpsState(double c, double gamma_b, Schedule schedule);
  double lambda_at(long k) const;
};

// H = {x : <alpha, x> <= beta}, built from gradient cocoercivity so that the
// inner minimizer set lies inside while the current iterate does not.
struct Halfspace {
  Eigen::VectorXd alpha;
  double beta = 0.0;
};

// ||sum w grad f||^2 / sum w ||grad f||^2, in [0, 1] by Jensen.
// Throws on a degenerate batch (weighted_sq == 0).
double l_adapt(const BatchStats& stats);

// alpha = batch gradient, beta = <alpha, x> - sum (w_i/L_i)||grad f_i||^2.
Halfspace halfspace(const Eigen::VectorXd& x, const BatchStats& stats);

// t_k = lambda_k * min{ mu (f_J - l*_J) / ||grad_J||^2, t_{k-1}/lambda_{k-1} }.
// Updates the state; requires a nonzero batch gradient.
double decmsps_next(DecmSpsState& state, const BatchStats& stats, double mu,
                    long k);

// t = mu / (L_max * L_adapt); at least mu / L_max since L_adapt <= 1.
double block_adaptive_step(double mu, double l_max, double l_adapt_value);

// Minimizer t >= 0 of phi(t) = psi*(x* - t alpha) + t beta, i.e. the dual
// stepsize of the Bregman projection onto the halfspace. Closed form for the
// Euclidean kernel; bracketing and bisection on phi' for the elastic net,
// returning the smallest minimizer when phi' has a flat zero segment.
// bracket_hint, when positive, seeds the initial upper bracket.
double exact_projective_step(const Kernel& kernel, const Eigen::VectorXd& x_star,
                             const Halfspace& hs, double tol = 1e-12,
                             double bracket_hint = 0.0);

enum class StepsizeKind { DecmSps, ExactProjective, BlockAdaptive };

struct StepsizeRule {
  StepsizeKind kind = StepsizeKind::ExactProjective;
  double c = 0.2;
  double gamma_b = 100.0;
  Schedule schedule = Schedule::Constant;
  double exact_tol = 1e-12;

  static StepsizeRule decmsps(double c, double gamma_b,
                              Schedule schedule = Schedule::Constant) {
    StepsizeRule rule;
    rule.kind = StepsizeKind::DecmSps;
    rule.c = c;
    rule.gamma_b = gamma_b;
    rule.schedule = schedule;
    return rule;
  }
  static StepsizeRule exact(double tol = 1e-12) {
    StepsizeRule rule;
    rule.kind = StepsizeKind::ExactProjective;
    rule.exact_tol = tol;
    return rule;
  }
  static StepsizeRule block_adaptive() {
    StepsizeRule rule;
    rule.kind = StepsizeKind::BlockAdaptive;
    return rule;
  }
};

// Per-run stepsize selector; owns the DecmSPS state when that rule is active.
class StepsizeEngine {
 public:
  StepsizeEngine(const StepsizeRule& rule, double mu, double l_max);

  // The caller must skip degenerate batches (zero batch gradient).
  double next(const BatchStats& stats, const Eigen::VectorXd& x,
              const Eigen::VectorXd& x_star, const Kernel& kernel, long k);

  const DecmSpsState& decmsps_state() const { return decmsps_state_; }

 private:
  StepsizeRule rule_;
  double mu_;
  double l_max_;
  DecmSpsState decmsps_state_;
};

}  // namespace sbbp
