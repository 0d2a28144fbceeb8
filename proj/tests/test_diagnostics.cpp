#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Core>
#include <Eigen/SVD>
#include <cmath>
#include <sstream>

#include "oracles.hpp"
#include "sbbp/diagnostics.hpp"
#include "sbbp/instances.hpp"

using Eigen::MatrixXd;
using Eigen::VectorXd;
using namespace sbbp;

namespace {

// Independent eta computation, enumerating supports in reverse order.
double eta_reference(const MatrixXd& a, const VectorXd& xhat, double lambda) {
  const int n = static_cast<int>(a.cols());
  double sigma_min = std::numeric_limits<double>::infinity();
  for (unsigned mask = (1u << n) - 1; mask >= 1; --mask) {
    std::vector<int> cols;
    for (int j = n - 1; j >= 0; --j) {
      if (mask & (1u << j)) cols.push_back(j);
    }
    MatrixXd sub(a.rows(), cols.size());
    for (std::size_t c = 0; c < cols.size(); ++c) sub.col(c) = a.col(cols[c]);
    if (sub.isZero(0.0)) continue;
    Eigen::JacobiSVD<MatrixXd> svd(sub);
    sigma_min = std::min(sigma_min, svd.singularValues().minCoeff());
  }
  double xmin = std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < xhat.size(); ++j) {
    if (xhat[j] != 0.0) xmin = std::min(xmin, std::abs(xhat[j]));
  }
  return sigma_min * sigma_min * xmin / (xmin + 2.0 * lambda);
}

}  // namespace

TEST_CASE("eta_constant closed cases") {
  const MatrixXd eye = MatrixXd::Identity(2, 2);
  const VectorXd xhat = (VectorXd(2) << 1, 0).finished();
  CHECK(eta_constant(eye, xhat, 0.0) == doctest::Approx(1.0));
  CHECK(eta_constant(eye, xhat, 1.0) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("eta_constant against an independent enumeration") {
  SplitMix64 rng(42);
  const MatrixXd a = oracles::random_matrix(rng, 6, 4);
  VectorXd xhat = VectorXd::Zero(4);
  xhat[1] = 0.8;
  xhat[3] = -1.7;
  CHECK(eta_constant(a, xhat, 1.0) ==
        doctest::Approx(eta_reference(a, xhat, 1.0)).epsilon(1e-12));
  // permutation invariance
  const int order[4] = {2, 0, 3, 1};
  MatrixXd a_perm(6, 4);
  VectorXd x_perm(4);
  for (int j = 0; j < 4; ++j) {
    a_perm.col(j) = a.col(order[j]);
    x_perm[j] = xhat[order[j]];
  }
  CHECK(eta_constant(a_perm, x_perm, 1.0) ==
        doctest::Approx(eta_constant(a, xhat, 1.0)).epsilon(1e-12));
}

TEST_CASE("eta_constant errors") {
  SplitMix64 rng(43);
  const MatrixXd wide = oracles::random_matrix(rng, 4, 13);
  CHECK_THROWS_AS(eta_constant(wide, VectorXd::Ones(13), 1.0),
                  std::invalid_argument);
  const MatrixXd ok = oracles::random_matrix(rng, 4, 3);
  CHECK_THROWS_AS(eta_constant(ok, VectorXd::Zero(3), 1.0),
                  std::invalid_argument);
}

TEST_CASE("adaptivity_condition") {
  CHECK(adaptivity_condition(0.2, 100.0, 20, 1000));
  CHECK(!adaptivity_condition(0.0, 0.0, 5, 100));
  const int tau = 6, m = 40;
  const double boundary = tau / (12.0 * std::log(1.0 + m));
  CHECK(adaptivity_condition(1.0, boundary, tau, m));  // inclusive
}

TEST_CASE("inner optimum oracle") {
  // consistent equality system: the minimum is zero
  std::vector<ConstraintKind> kinds(12, ConstraintKind::Equality);
  const LfpInstance consistent = gen_lfp({12, 6, 2, kinds, 61});
  const InnerOptimum zero = inner_optimum_oracle(consistent.problem, 4000);
  CHECK(zero.f_bar <= 1e-12);
  CHECK(zero.stationary);

  // two incompatible 1-D equality rows {x=0} and {x=1}: F_bar = 1/8 at x=1/2
  RowMajorMatrix rows(2, 1);
  rows << 1, 1;
  const LfpProblem pair(rows, (VectorXd(2) << 0, 1).finished(),
                        {ConstraintKind::Equality, ConstraintKind::Equality});
  const InnerOptimum mid = inner_optimum_oracle(pair, 200);
  CHECK(mid.f_bar == doctest::Approx(0.125).epsilon(1e-10));
  CHECK(mid.x_bar[0] == doctest::Approx(0.5).epsilon(1e-8));

  // inconsistent SFP: strictly positive minimum
  const SfpInstance inconsistent = gen_sfp({60, 12, 10, 5, 3, 0.1, false, 62});
  const InnerOptimum pos = inner_optimum_oracle(inconsistent.problem, 3000);
  CHECK(pos.f_bar > 0.0);

  // monotone in the iteration budget
  const InnerOptimum coarse = inner_optimum_oracle(inconsistent.problem, 300);
  CHECK(pos.f_bar <= coarse.f_bar + 1e-15);
}

TEST_CASE("bdgc witness on the identity system") {
  // Euclidean kernel, A = I: D = ||x - xhat||^2 / 2, so the ratio is 2
  RowMajorMatrix eye = RowMajorMatrix::Identity(2, 2);
  const VectorXd xhat = (VectorXd(2) << 1.5, -0.5).finished();
  const LfpProblem problem(eye, xhat,
                           {ConstraintKind::Equality, ConstraintKind::Equality});
  RunRecord record;
  record.kernel = Kernel::euclidean();
  record.iterates.push_back(IterateState::zeros(2));
  const double eta = eta_constant(problem.matrix(), xhat, 0.0);
  const double worst = bdgc_witness_check(problem, record, xhat, eta);
  CHECK(worst == doctest::Approx(2.0));
  CHECK(worst >= eta - 1e-8);
}

TEST_CASE("bdgc witness on runs") {
  std::vector<ConstraintKind> kinds(4, ConstraintKind::Equality);
  const LfpInstance eye_like = gen_lfp({4, 4, 2, kinds, 63});
  SolverConfig cfg;
  cfg.kernel = Kernel::elastic_net(1.0);
  cfg.rule = StepsizeRule::exact();
  cfg.sampler = {SamplingMode::UniformNoReplacement, 2, 64};
  cfg.max_iters = 2000;
  cfg.record_every = 1;
  cfg.store_iterates = true;
  const RunRecord record = run(cfg, eye_like.problem, &eye_like.xhat);
  const double eta = eta_constant(eye_like.problem.matrix(), eye_like.xhat, 1.0);
  const double worst = bdgc_witness_check(eye_like.problem, record, eye_like.xhat, eta);
  CHECK(worst >= eta - 1e-8);

  // incompatible runs are rejected
  const LfpInstance ineq = gen_lfp({6, 4, 2, {}, 65});
  CHECK_THROWS_AS(bdgc_witness_check(ineq.problem, record, eye_like.xhat, eta),
                  std::invalid_argument);
  RunRecord no_iterates = record;
  no_iterates.iterates.clear();
  CHECK_THROWS_AS(
      bdgc_witness_check(eye_like.problem, no_iterates, eye_like.xhat, eta),
      std::invalid_argument);
}

TEST_CASE("audit_run validates decmsps bounds and detects tampering") {
  const LfpInstance inst = gen_lfp({30, 10, 3, {}, 71});
  SolverConfig cfg;
  cfg.kernel = Kernel::elastic_net(1.0);
  cfg.rule = StepsizeRule::decmsps(0.2, 100.0);
  cfg.sampler = {SamplingMode::UniformNoReplacement, 5, 72};
  cfg.max_iters = 300;
  cfg.record_every = 1;
  const RunRecord record = run(cfg, inst.problem, &inst.xhat);
  const TheoryAudit audit = audit_run(record, cfg, inst.problem, &inst.xhat);
  CHECK(audit.stepsize_bounds_ok);
  CHECK(audit.max_l_adapt <= 1.0 + 1e-12);

  // inflate the last recorded stepsize by 10%: monotonicity must flag it
  RunRecord tampered = record;
  for (auto it = tampered.rows.rbegin(); it != tampered.rows.rend(); ++it) {
    if (!it->skipped && !std::isnan(it->t)) {
      it->t *= 1.1;
      break;
    }
  }
  const TheoryAudit bad = audit_run(tampered, cfg, inst.problem, &inst.xhat);
  CHECK(!bad.stepsize_bounds_ok);
}

TEST_CASE("audit_run checks the projective descent inequality") {
  const LfpInstance inst = gen_lfp({30, 10, 3, {}, 73});
  for (const StepsizeRule& rule :
       {StepsizeRule::exact(), StepsizeRule::block_adaptive()}) {
    SolverConfig cfg;
    cfg.kernel = Kernel::elastic_net(1.0);
    cfg.rule = rule;
    cfg.sampler = {SamplingMode::UniformNoReplacement, 5, 74};
    cfg.max_iters = 300;
    cfg.record_every = 1;
    const RunRecord record = run(cfg, inst.problem, &inst.xhat);
    const TheoryAudit audit = audit_run(record, cfg, inst.problem, &inst.xhat);
    CHECK(audit.descent_ok);
  }
}

TEST_CASE("audit comment rendering") {
  TheoryAudit audit;
  audit.max_l_adapt = 0.5;
  audit.worst_violation = -1e-15;
  audit.worst_iteration = 3;
  std::ostringstream out;
  append_audit_comment(out, audit);
  CHECK(out.str().rfind("# audit:", 0) == 0);
  CHECK(out.str().find("stepsize_bounds_ok=1") != std::string::npos);
}
