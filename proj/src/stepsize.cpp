#include "sbbp/stepsize.hpp"

#include <cmath>
#include <stdexcept>

namespace sbbp {

DecmSpsState::DecmSpsState(double c_in, double gamma_b_in, Schedule schedule_in)
    : c(c_in), gamma_b(gamma_b_in), schedule(schedule_in) {
  if (!(c > 0.0) || !(gamma_b > 0.0)) {
    throw std::invalid_argument("DecmSpsState: c and gamma_b must be positive");
  }
  // lambda_{-1} = lambda_0 and t_{-1} = gamma_b, so the initial cap on the
  // ratio t/lambda is gamma_b / lambda_0.
  prev_t_over_lambda = gamma_b / lambda_at(0);
}

double DecmSpsState::lambda_at(long k) const {
  if (schedule == Schedule::Constant) return 1.0 / c;
  return 1.0 / (c * std::sqrt(static_cast<double>(k) + 1.0));
}

double l_adapt(const BatchStats& stats) {
  if (stats.weighted_sq == 0.0) {
    throw std::domain_error("l_adapt: degenerate batch (all sampled constraints satisfied)");
  }
  return stats.grad.squaredNorm() / stats.weighted_sq;
}

Halfspace halfspace(const Eigen::VectorXd& x, const BatchStats& stats) {
  if (stats.weighted_sq == 0.0) {
    throw std::domain_error("halfspace: degenerate batch");
  }
  Halfspace hs;
  hs.alpha = stats.grad;
  hs.beta = stats.grad.dot(x) - stats.lipschitz_weighted_sq;
  return hs;
}

double decmsps_next(DecmSpsState& state, const BatchStats& stats, double mu,
                    long k) {
  const double grad_sq = stats.grad.squaredNorm();
  if (grad_sq == 0.0) {
    throw std::domain_error("decmsps_next: degenerate batch");
  }
  const double lambda_k = state.lambda_at(k);
  const double polyak = mu * (stats.value - stats.lower_bound) / grad_sq;
  const double ratio = std::min(polyak, state.prev_t_over_lambda);
  state.prev_t_over_lambda = ratio;
  return lambda_k * ratio;
}

double block_adaptive_step(double mu, double l_max, double l_adapt_value) {
  if (!(l_adapt_value > 0.0)) {
    throw std::domain_error("block_adaptive_step: degenerate batch");
  }
  return mu / (l_max * l_adapt_value);
}

namespace {

// phi'(t) = beta - <alpha, grad psi*(x* - t alpha)>; nondecreasing in t.
double phi_prime(const Kernel& kernel, const Eigen::VectorXd& x_star,
                 const Halfspace& hs, double t) {
  return hs.beta - hs.alpha.dot(grad_conj(kernel, x_star - t * hs.alpha));
}

}  // namespace

double exact_projective_step(const Kernel& kernel, const Eigen::VectorXd& x_star,
                             const Halfspace& hs, double tol,
                             double bracket_hint) {
  const double alpha_sq = hs.alpha.squaredNorm();
  if (alpha_sq == 0.0) {
    throw std::domain_error("exact_projective_step: degenerate halfspace (alpha = 0)");
  }
  if (kernel.variant() == KernelVariant::Euclidean) {
    const double t = (hs.alpha.dot(x_star) - hs.beta) / alpha_sq;
    return std::max(t, 0.0);
  }

  if (phi_prime(kernel, x_star, hs, 0.0) >= 0.0) return 0.0;

  double hi = bracket_hint > 0.0
                  ? bracket_hint
                  : std::max(1.0, (hs.alpha.dot(x_star) - hs.beta) / alpha_sq);
  double lo = 0.0;
  int doublings = 0;
  while (phi_prime(kernel, x_star, hs, hi) < 0.0) {
    if (++doublings > 60) {
      throw std::runtime_error("exact_projective_step: diverging bracket");
    }
    lo = hi;
    hi *= 2.0;
  }
  const double width_target = tol * std::max(1.0, hi);
  for (int iter = 0; iter < 200 && hi - lo > width_target; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (phi_prime(kernel, x_star, hs, mid) >= 0.0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  // lo is the left edge of the final bracket: the smallest minimizer up to tol.
  return lo;
}

StepsizeEngine::StepsizeEngine(const StepsizeRule& rule, double mu, double l_max)
    : rule_(rule),
      mu_(mu),
      l_max_(l_max),
      decmsps_state_(rule.c, rule.gamma_b, rule.schedule) {}

double StepsizeEngine::next(const BatchStats& stats, const Eigen::VectorXd& x,
                            const Eigen::VectorXd& x_star, const Kernel& kernel,
                            long k) {
  switch (rule_.kind) {
    case StepsizeKind::DecmSps:
      return decmsps_next(decmsps_state_, stats, mu_, k);
    case StepsizeKind::BlockAdaptive:
      return block_adaptive_step(mu_, l_max_, l_adapt(stats));
    case StepsizeKind::ExactProjective: {
      const Halfspace hs = halfspace(x, stats);
      const double hint = 2.0 * mu_ / (l_max_ * l_adapt(stats));
      return exact_projective_step(kernel, x_star, hs, rule_.exact_tol, hint);
    }
  }
  throw std::logic_error("StepsizeEngine: unknown rule");
}

}  // namespace sbbp
