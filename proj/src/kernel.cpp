#include "sbbp/kernel.hpp"

#include <cmath>
#include <stdexcept>

namespace sbbp {

Kernel Kernel::elastic_net(double lambda) {
  if (!(lambda >= 0.0)) {
    throw std::invalid_argument("elastic-net weight lambda must be >= 0");
  }
  return Kernel(KernelVariant::ElasticNet, lambda);
}

double psi_value(const Kernel& kernel, const Eigen::VectorXd& x) {
  const double sq = 0.5 * x.squaredNorm();
  if (kernel.variant() == KernelVariant::Euclidean) return sq;
  return kernel.lambda() * x.lpNorm<1>() + sq;
}

Eigen::VectorXd soft_threshold(double lambda, const Eigen::VectorXd& z) {
  if (lambda == 0.0) return z;
  return ((z.array().abs() - lambda).max(0.0) * z.array().sign()).matrix();
}

Eigen::VectorXd grad_conj(const Kernel& kernel, const Eigen::VectorXd& x_star) {
  if (kernel.variant() == KernelVariant::Euclidean) return x_star;
  return soft_threshold(kernel.lambda(), x_star);
}

double conj_value(const Kernel& kernel, const Eigen::VectorXd& x_star) {
  if (kernel.variant() == KernelVariant::Euclidean) {
    return 0.5 * x_star.squaredNorm();
  }
  return 0.5 * soft_threshold(kernel.lambda(), x_star).squaredNorm();
}

bool is_subgradient(const Kernel& kernel, const Eigen::VectorXd& x,
                    const Eigen::VectorXd& x_star, double tol) {
  if (x.size() != x_star.size()) return false;
  if (kernel.variant() == KernelVariant::Euclidean) {
    return (x_star - x).lpNorm<Eigen::Infinity>() <= tol;
  }
  const double lambda = kernel.lambda();
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    if (x[j] == 0.0) {
      if (std::abs(x_star[j]) > lambda + tol) return false;
    } else {
      const double sign = x[j] > 0.0 ? 1.0 : -1.0;
      if (std::abs(x_star[j] - (x[j] + lambda * sign)) > tol) return false;
    }
  }
  return true;
}

double bregman_distance(const Kernel& kernel, const Eigen::VectorXd& x,
                        const Eigen::VectorXd& x_star,
                        const Eigen::VectorXd& y) {
  if (x.size() != x_star.size() || x.size() != y.size()) {
    throw std::invalid_argument("bregman_distance: dimension mismatch");
  }
  if (!is_subgradient(kernel, x, x_star)) {
    throw std::invalid_argument(
        "bregman_distance: x_star is not a subgradient of psi at x");
  }
  return conj_value(kernel, x_star) - x_star.dot(y) + psi_value(kernel, y);
}

}  // namespace sbbp
