// Scratch probe, not part of the build (compiled ad hoc).
#include <cstdio>
#include "oracles.hpp"
#include "sbbp/diagnostics.hpp"
#include "sbbp/harness.hpp"
#include "sbbp/instances.hpp"
#include "sbbp/solver.hpp"

using namespace sbbp;
using Eigen::VectorXd;

int main() {
  // --- criterion 7 probe: support mismatch magnitudes on trial 1
  for (int trial : {1, 6, 7}) {
    const LfpInstance inst = gen_lfp({1000, 200, 20, {}, 9000ULL + trial});
    SolverConfig cfg;
    cfg.kernel = Kernel::elastic_net(1.0);
    cfg.rule = StepsizeRule::exact();
    cfg.sampler = {SamplingMode::UniformNoReplacement, 20, 9000ULL + trial};
    cfg.max_iters = 20000;
    cfg.tol_rel_err = 1e-10;
    cfg.record_every = 20000;
    const RunRecord rec = run(cfg, inst.problem, &inst.xhat);
    std::printf("trial %d: it=%ld rel=%.3e\n", trial, rec.iterations_used,
                rel_error(rec.final_state.x, inst.xhat));
    for (int j = 0; j < 200; ++j) {
      const bool in_x = rec.final_state.x[j] != 0.0;
      const bool in_hat = inst.xhat[j] != 0.0;
      if (in_x != in_hat) {
        std::printf("  j=%d x=%.3e xhat=%.3e dual=%.17g (lambda=1)\n", j,
                    rec.final_state.x[j], inst.xhat[j], rec.final_state.x_star[j]);
      }
    }
  }

  // --- criterion 6 probe: iteration counts across a tau grid, 9 seeds
  std::printf("\ntau grid on 400x100 (exact, partition):\n");
  for (int trial = 0; trial < 5; ++trial) {
    const LfpInstance inst = gen_lfp({400, 100, 20, {}, 11000ULL + trial});
    const int tau_star = optimal_block_size(inst.problem.matrix());
    const double svd = oracles::svd_spectral_norm_sq(Eigen::MatrixXd(inst.problem.matrix()));
    std::printf("trial %d tau*=%d (sigma^2=%.3f svd-oracle %.3f)\n  ", trial,
                tau_star, 400.0 / tau_star, svd);
    for (int tau : {11, 20, 44, 100, 176, 200, 400}) {
      SolverConfig cfg;
      cfg.kernel = Kernel::elastic_net(1.0);
      cfg.rule = StepsizeRule::exact();
      cfg.sampler = {SamplingMode::Partition, tau, 11000ULL + trial};
      cfg.max_iters = 20000;
      cfg.tol_rel_err = 1e-6;
      cfg.record_every = 20000;
      const RunRecord rec = run(cfg, inst.problem, &inst.xhat);
      std::printf("tau=%d:%ld  ", tau, rec.iterations_used);
    }
    std::printf("\n");
  }

  // block adaptive + decmsps shapes
  std::printf("\ntau grid, block adaptive:\n  ");
  {
    const LfpInstance inst = gen_lfp({400, 100, 20, {}, 11000ULL});
    for (int tau : {11, 44, 176, 400}) {
      SolverConfig cfg;
      cfg.kernel = Kernel::elastic_net(1.0);
      cfg.rule = StepsizeRule::block_adaptive();
      cfg.sampler = {SamplingMode::Partition, tau, 11000ULL};
      cfg.max_iters = 20000;
      cfg.tol_rel_err = 1e-6;
      cfg.record_every = 20000;
      std::printf("tau=%d:%ld  ", tau,
                  run(cfg, inst.problem, &inst.xhat).iterations_used);
    }
    std::printf("\ndecmsps c=0.5 gb=100:\n  ");
    for (int tau : {11, 44, 176, 400}) {
      SolverConfig cfg;
      cfg.kernel = Kernel::elastic_net(1.0);
      cfg.rule = StepsizeRule::decmsps(0.5, 100.0);
      cfg.sampler = {SamplingMode::Partition, tau, 11000ULL};
      cfg.max_iters = 20000;
      cfg.tol_rel_err = 1e-6;
      cfg.record_every = 20000;
      std::printf("tau=%d:%ld  ", tau,
                  run(cfg, inst.problem, &inst.xhat).iterations_used);
    }
    std::printf("\n");
  }
  return 0;
}
