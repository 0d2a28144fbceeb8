#pragma once

#include <Eigen/Core>

namespace sbbp {

enum class KernelVariant { Euclidean, ElasticNet };

// Strongly convex regularizer psi with closed-form conjugate:
//   Euclidean:   psi(x) = 1/2 ||x||^2
//   ElasticNet:  psi(x) = lambda ||x||_1 + 1/2 ||x||^2
// Both variants are 1-strongly convex, so mu() is identically 1.
class Kernel {
 public:
  static Kernel euclidean() { return Kernel(KernelVariant::Euclidean, 0.0); }
  static Kernel elastic_net(double lambda);

  KernelVariant variant() const { return variant_; }
  double lambda() const { return lambda_; }
  double mu() const { return 1.0; }

 private:
  Kernel(KernelVariant variant, double lambda)
      : variant_(variant), lambda_(lambda) {}

  KernelVariant variant_;
  double lambda_;
};

// psi(x); nonnegative for finite x.
double psi_value(const Kernel& kernel, const Eigen::VectorXd& x);

// Componentwise max{|z_j| - lambda, 0} * sign(z_j), with sign(0) = 0.
Eigen::VectorXd soft_threshold(double lambda, const Eigen::VectorXd& z);

// grad psi*(x*): the soft-thresholding map for the elastic net, identity for
// the Euclidean kernel. 1/mu-Lipschitz.
Eigen::VectorXd grad_conj(const Kernel& kernel, const Eigen::VectorXd& x_star);

// psi*(x*) = 1/2 ||grad psi*(x*)||^2 for both variants.
double conj_value(const Kernel& kernel, const Eigen::VectorXd& x_star);

// Whether x_star is a subgradient of psi at x, up to tol per component.
bool is_subgradient(const Kernel& kernel, const Eigen::VectorXd& x,
                    const Eigen::VectorXd& x_star, double tol = 1e-10);

// Bregman distance D_psi^{x*}(x, y) = psi*(x*) - <x*, y> + psi(y).
// Requires x_star in the subdifferential of psi at x (validated to 1e-10);
// bounded below by mu/2 ||x - y||^2 and zero iff x == y.
double bregman_distance(const Kernel& kernel, const Eigen::VectorXd& x,
                        const Eigen::VectorXd& x_star, const Eigen::VectorXd& y);

// Primal/dual pair linked by x = grad_conj(kernel, x_star).
struct IterateState {
  Eigen::VectorXd x;
  Eigen::VectorXd x_star;

  static IterateState zeros(Eigen::Index n) {
    return IterateState{Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n)};
  }
  static IterateState from_dual(const Kernel& kernel, Eigen::VectorXd x_star) {
    IterateState state;
    state.x = grad_conj(kernel, x_star);
    state.x_star = std::move(x_star);
    return state;
  }
};

}  // namespace sbbp
