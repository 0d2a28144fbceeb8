#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Core>

#include "oracles.hpp"
#include "sbbp/kernel.hpp"
#include "sbbp/rng.hpp"

using Eigen::VectorXd;
using namespace sbbp;

namespace {

VectorXd vec(std::initializer_list<double> values) {
  VectorXd v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

}  // namespace

TEST_CASE("psi_value") {
  const Kernel en = Kernel::elastic_net(1.0);
  CHECK(psi_value(en, vec({0, 0})) == doctest::Approx(0.0));
  CHECK(psi_value(en, vec({2, 0})) == doctest::Approx(4.0));
  CHECK(psi_value(Kernel::euclidean(), vec({3, 4})) == doctest::Approx(12.5));
  CHECK(psi_value(en, vec({-1, 2})) >= 0.0);
}

TEST_CASE("soft_threshold") {
  CHECK(soft_threshold(1.0, vec({2, -0.5, 0})).isApprox(vec({1, 0, 0})));
  CHECK(soft_threshold(0.0, vec({2, -0.5})) == vec({2, -0.5}));  // exact
  CHECK(soft_threshold(3.0, vec({1, -2})).isZero(0.0));
}

TEST_CASE("grad_conj") {
  const Kernel en = Kernel::elastic_net(1.0);
  CHECK(grad_conj(en, vec({3, -2})).isApprox(vec({2, -1})));
  CHECK(grad_conj(Kernel::euclidean(), vec({3, -2})) == vec({3, -2}));
  CHECK(grad_conj(en, vec({0.5})).isZero(0.0));
}

TEST_CASE("conj_value") {
  const Kernel en = Kernel::elastic_net(1.0);
  CHECK(conj_value(en, vec({3})) == doctest::Approx(2.0));
  CHECK(conj_value(en, vec({0.5})) == doctest::Approx(0.0));
  CHECK(conj_value(Kernel::euclidean(), vec({1, 1})) == doctest::Approx(1.0));
}

TEST_CASE("bregman_distance basics") {
  const Kernel en = Kernel::elastic_net(1.0);
  // y == x gives zero
  const VectorXd x = vec({2, 0});
  const VectorXd x_star = vec({3, 0.5});  // valid subgradient at (2, 0)
  CHECK(bregman_distance(en, x, x_star, x) == doctest::Approx(0.0).epsilon(1e-12));
  // direct substitution
  CHECK(bregman_distance(en, vec({0}), vec({0}), vec({2})) == doctest::Approx(4.0));
  CHECK(bregman_distance(Kernel::euclidean(), vec({1}), vec({1}), vec({3})) ==
        doctest::Approx(2.0));
}

TEST_CASE("bregman_distance rejects invalid subgradients") {
  const Kernel en = Kernel::elastic_net(1.0);
  // |x_star_j| > lambda where x_j = 0
  CHECK_THROWS_AS(bregman_distance(en, vec({0}), vec({1.5}), vec({1})),
                  std::invalid_argument);
  // x_star_j != x_j + lambda sign(x_j) on the support
  CHECK_THROWS_AS(bregman_distance(en, vec({2}), vec({2}), vec({1})),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      bregman_distance(Kernel::euclidean(), vec({1}), vec({2}), vec({0})),
      std::invalid_argument);
}

TEST_CASE("conjugate gradient is 1/mu Lipschitz") {
  SplitMix64 rng(11);
  const Kernel kernels[] = {Kernel::euclidean(), Kernel::elastic_net(0.7),
                            Kernel::elastic_net(2.0)};
  for (const Kernel& kernel : kernels) {
    for (int trial = 0; trial < 1000; ++trial) {
      const VectorXd u = oracles::random_vector(rng, 8);
      const VectorXd v = oracles::random_vector(rng, 8);
      const double lhs = (grad_conj(kernel, u) - grad_conj(kernel, v)).norm();
      CHECK(lhs <= (u - v).norm() / kernel.mu() + 1e-12);
    }
  }
}

TEST_CASE("bregman distance dominates the squared euclidean distance") {
  SplitMix64 rng(12);
  const Kernel en = Kernel::elastic_net(1.3);
  for (int trial = 0; trial < 500; ++trial) {
    // admissible pair via the dual: x = grad psi*(z) makes z a subgradient at x
    const VectorXd z = 3.0 * oracles::random_vector(rng, 6);
    const VectorXd x = grad_conj(en, z);
    const VectorXd y = oracles::random_vector(rng, 6);
    const double dist = bregman_distance(en, x, z, y);
    CHECK(dist >= 0.5 * en.mu() * (x - y).squaredNorm() - 1e-12);
  }
}

TEST_CASE("fenchel identity at the conjugate gradient") {
  SplitMix64 rng(13);
  const Kernel kernels[] = {Kernel::euclidean(), Kernel::elastic_net(1.0)};
  for (const Kernel& kernel : kernels) {
    for (int trial = 0; trial < 500; ++trial) {
      const VectorXd z = 2.0 * oracles::random_vector(rng, 7);
      const VectorXd x = grad_conj(kernel, z);
      const double gap = psi_value(kernel, x) + conj_value(kernel, z) - x.dot(z);
      CHECK(std::abs(gap) <= 1e-10);
    }
  }
}

TEST_CASE("iterate state stays linked to its dual") {
  const Kernel en = Kernel::elastic_net(1.0);
  const IterateState state = IterateState::from_dual(en, vec({3, -0.2, -4}));
  CHECK(state.x == grad_conj(en, state.x_star));
  CHECK(is_subgradient(en, state.x, state.x_star));
  const IterateState zeros = IterateState::zeros(4);
  CHECK(zeros.x.isZero(0.0));
  CHECK(is_subgradient(en, zeros.x, zeros.x_star));
}

TEST_CASE("elastic net rejects negative lambda") {
  CHECK_THROWS_AS(Kernel::elastic_net(-0.5), std::invalid_argument);
}
