#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Core>
#include <cmath>

#include "oracles.hpp"
#include "sbbp/instances.hpp"

using Eigen::VectorXd;
using namespace sbbp;

TEST_CASE("gen_lfp construction invariants") {
  const LfpInstance inst = gen_lfp({40, 15, 5, {}, 123});
  const auto& a = inst.problem.matrix();
  for (int i = 0; i < 40; ++i) {
    CHECK(std::abs(a.row(i).norm() - 1.0) <= 1e-10);
  }
  int nonzeros = 0;
  for (int j = 0; j < 15; ++j) {
    if (inst.xhat[j] != 0.0) ++nonzeros;
  }
  CHECK(nonzeros == 5);
  // residual of xhat is exactly zero, componentwise
  for (int i = 0; i < 40; ++i) {
    const double r = a.row(i).dot(inst.xhat) - inst.problem.rhs()[i];
    CHECK(std::max(r, 0.0) == 0.0);
  }
}

TEST_CASE("gen_lfp determinism and seed separation") {
  const LfpInstance a = gen_lfp({10, 6, 2, {}, 9});
  const LfpInstance b = gen_lfp({10, 6, 2, {}, 9});
  CHECK(a.problem.matrix() == b.problem.matrix());  // bitwise
  CHECK(a.problem.rhs() == b.problem.rhs());
  CHECK(a.xhat == b.xhat);
  const LfpInstance c = gen_lfp({10, 6, 2, {}, 10});
  CHECK(a.problem.matrix() != c.problem.matrix());
}

TEST_CASE("gen_lfp kinds and validation") {
  std::vector<ConstraintKind> kinds(6, ConstraintKind::Equality);
  const LfpInstance inst = gen_lfp({6, 4, 2, kinds, 77});
  for (ConstraintKind kind : inst.problem.kinds()) {
    CHECK(kind == ConstraintKind::Equality);
  }
  CHECK_THROWS_AS(gen_lfp({5, 4, 0, {}, 1}), std::invalid_argument);
  CHECK_THROWS_AS(gen_lfp({5, 4, 5, {}, 1}), std::invalid_argument);
  CHECK_THROWS_AS(gen_lfp({5, 4, 2, kinds, 1}), std::invalid_argument);  // size
}

TEST_CASE("nullspace unit vector") {
  Eigen::MatrixXd a(2, 1);
  a << 1, 0;
  const VectorXd v = nullspace_unit_vector_from(a, (VectorXd(2) << 1, 1).finished());
  CHECK(v.isApprox((VectorXd(2) << 0, 1).finished(), 1e-12));

  SplitMix64 rng(505);
  const Eigen::MatrixXd big = oracles::random_matrix(rng, 40, 10);
  const VectorXd w = nullspace_unit_vector(big, rng);
  CHECK(std::abs(w.norm() - 1.0) <= 1e-12);
  CHECK((big.transpose() * w).norm() <= 1e-8);
  // QR-based oracle: distance from w to range(A) must equal ||w|| = 1
  CHECK(oracles::qr_range_distance(big, w) == doctest::Approx(1.0).epsilon(1e-8));

  Eigen::MatrixXd square = oracles::random_matrix(rng, 5, 5);
  CHECK_THROWS_AS(nullspace_unit_vector(square, rng), std::invalid_argument);
}

TEST_CASE("gen_sfp consistent construction") {
  const SfpSpec spec{40, 10, 12, 4, 3, 0.05, true, 808};
  const SfpInstance inst = gen_sfp(spec);
  const double target = std::sqrt(4.0) * 0.05;
  for (int i = 0; i < 10; ++i) {
    const SfpBlock& blk = inst.problem.block(i);
    const double activity = (blk.a * inst.xhat - blk.center).norm();
    CHECK(std::abs(activity - target) <= 1e-10);
    CHECK(activity <= blk.radius);  // feasibility is exact
    CHECK(f_value(inst.problem, i, inst.xhat) == 0.0);
  }
}

TEST_CASE("gen_sfp sigma zero degenerates to singleton balls") {
  const SfpInstance inst = gen_sfp({12, 3, 6, 4, 2, 0.0, true, 11});
  for (int i = 0; i < 3; ++i) {
    CHECK(inst.problem.block(i).radius == 0.0);
    CHECK(f_value(inst.problem, i, inst.xhat) == 0.0);
  }
}

TEST_CASE("gen_sfp inconsistent construction") {
  const SfpSpec spec{60, 12, 10, 5, 3, 0.1, false, 909};
  const SfpInstance inst = gen_sfp(spec);
  // stack the full matrix and the perturbed rhs
  Eigen::MatrixXd a(60, 10);
  VectorXd b_sigma(60);
  for (int i = 0; i < 12; ++i) {
    a.middleRows(i * 5, 5) = inst.problem.block(i).a;
    b_sigma.segment(i * 5, 5) = inst.problem.block(i).center;
  }
  const double dist = oracles::qr_range_distance(a, b_sigma);
  const double sqrt_m_r = std::sqrt(12.0) * inst.problem.block(0).radius;
  const double sigma_sqrt_m = 0.1 * std::sqrt(60.0);
  CHECK(dist - sqrt_m_r >= sigma_sqrt_m / 2.0 - 1e-8);
  CHECK(dist == doctest::Approx(sigma_sqrt_m).epsilon(1e-8));
}

TEST_CASE("gen_sfp determinism and paper configuration") {
  const SfpSpec spec{800, 80, 200, 10, 20, 0.1, true, 2024};
  const SfpInstance a = gen_sfp(spec);
  const SfpInstance b = gen_sfp(spec);
  CHECK(a.xhat == b.xhat);
  CHECK(a.b == b.b);
  for (int i = 0; i < 80; ++i) {
    CHECK(a.problem.block(i).a == b.problem.block(i).a);
    CHECK(a.problem.block(i).center == b.problem.block(i).center);
  }
  for (int i = 0; i < 80; ++i) {
    CHECK(f_value(a.problem, i, a.xhat) == 0.0);
  }
}

TEST_CASE("gen_sfp validation") {
  CHECK_THROWS_AS(gen_sfp({10, 3, 5, 4, 2, 0.1, true, 1}), std::invalid_argument);
  CHECK_THROWS_AS(gen_sfp({12, 3, 5, 4, 2, -0.1, true, 1}), std::invalid_argument);
  // inconsistent needs M > n
  CHECK_THROWS_AS(gen_sfp({12, 3, 20, 4, 2, 0.1, false, 1}), std::invalid_argument);
}
