#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Core>
#include <set>

#include "oracles.hpp"
#include "sbbp/sampling.hpp"

using namespace sbbp;

TEST_CASE("draw_uniform_batch basics") {
  SplitMix64 rng(1);
  const MiniBatch full = draw_uniform_batch(rng, 5, 5);
  CHECK(full.indices == std::vector<int>{0, 1, 2, 3, 4});
  for (double w : full.weights) CHECK(w == doctest::Approx(0.2));

  const MiniBatch one = draw_uniform_batch(rng, 1, 1);
  CHECK(one.indices == std::vector<int>{0});
  CHECK(one.weights[0] == 1.0);

  CHECK_THROWS_AS(draw_uniform_batch(rng, 5, 0), std::out_of_range);
  CHECK_THROWS_AS(draw_uniform_batch(rng, 5, 6), std::out_of_range);
}

TEST_CASE("draw_uniform_batch determinism") {
  SplitMix64 a(42);
  SplitMix64 b(42);
  for (int i = 0; i < 50; ++i) {
    const MiniBatch ba = draw_uniform_batch(a, 100, 10);
    const MiniBatch bb = draw_uniform_batch(b, 100, 10);
    CHECK(ba.indices == bb.indices);
    ba.validate(100);
  }
}

TEST_CASE("uniform sampler marginal frequencies") {
  SplitMix64 rng(7);
  std::vector<long> hits(10, 0);
  const long draws = 100000;
  for (long d = 0; d < draws; ++d) {
    const MiniBatch batch = draw_uniform_batch(rng, 10, 3);
    for (int i : batch.indices) ++hits[i];
  }
  for (long h : hits) {
    const double freq = static_cast<double>(h) / draws;
    CHECK(freq >= 0.27);
    CHECK(freq <= 0.33);
  }
}

TEST_CASE("build_partition structure") {
  SplitMix64 rng(3);
  const Partition p63 = build_partition(rng, 6, 3);
  REQUIRE(p63.blocks.size() == 2);
  CHECK(p63.blocks[0].size() == 3);
  CHECK(p63.blocks[1].size() == 3);

  const Partition p73 = build_partition(rng, 7, 3);
  REQUIRE(p73.blocks.size() == 2);
  CHECK(p73.blocks[0].size() == 3);
  CHECK(p73.blocks[1].size() == 4);  // remainder joins the last block

  const Partition p44 = build_partition(rng, 4, 4);
  REQUIRE(p44.blocks.size() == 1);
  CHECK(p44.blocks[0] == std::vector<int>{0, 1, 2, 3});
}

TEST_CASE("partition blocks are disjoint and cover [m]") {
  SplitMix64 rng(5);
  for (int m : {1, 2, 5, 13, 40}) {
    for (int tau = 1; tau <= m; ++tau) {
      const Partition part = build_partition(rng, m, tau);
      std::set<int> seen;
      for (const auto& block : part.blocks) {
        CHECK(!block.empty());
        for (int i : block) {
          CHECK(seen.insert(i).second);  // no duplicates across blocks
          CHECK(i >= 0);
          CHECK(i < m);
        }
      }
      CHECK(static_cast<int>(seen.size()) == m);
    }
  }
}

TEST_CASE("draw_partition_block") {
  SplitMix64 rng(9);
  Partition single;
  single.block_size = 3;
  single.blocks = {{0, 1, 2}};
  for (int i = 0; i < 5; ++i) {
    CHECK(draw_partition_block(rng, single).indices == std::vector<int>{0, 1, 2});
  }

  Partition two;
  two.block_size = 2;
  two.blocks = {{0, 1}, {2, 3}};
  long first = 0;
  const long draws = 10000;
  for (long d = 0; d < draws; ++d) {
    if (draw_partition_block(rng, two).indices[0] == 0) ++first;
  }
  const double freq = static_cast<double>(first) / draws;
  CHECK(freq >= 0.45);
  CHECK(freq <= 0.55);

  Partition four;
  four.block_size = 4;
  four.blocks = {{0, 1, 2, 3}};
  const MiniBatch batch = draw_partition_block(rng, four);
  for (double w : batch.weights) CHECK(w == doctest::Approx(0.25));
}

TEST_CASE("spectral_norm_sq") {
  CHECK(spectral_norm_sq(Eigen::MatrixXd::Identity(4, 4)) == doctest::Approx(1.0));
  Eigen::MatrixXd two(1, 1);
  two << 2.0;
  CHECK(spectral_norm_sq(two) == doctest::Approx(4.0));

  SplitMix64 rng(11);
  const Eigen::MatrixXd a = oracles::random_matrix(rng, 50, 20);
  const double expected = oracles::svd_spectral_norm_sq(a);
  CHECK(std::abs(spectral_norm_sq(a) - expected) <= 1e-6 * expected);

  CHECK_THROWS_AS(spectral_norm_sq(Eigen::MatrixXd::Zero(3, 3)),
                  std::invalid_argument);
}

TEST_CASE("spectral_norm_sq small and structured cases") {
  SplitMix64 rng(12);
  const Eigen::MatrixXd tall = oracles::random_matrix(rng, 30, 2);
  CHECK(spectral_norm_sq(tall) ==
        doctest::Approx(oracles::svd_spectral_norm_sq(tall)).epsilon(1e-10));
  const Eigen::MatrixXd wide = oracles::random_matrix(rng, 2, 30);
  CHECK(spectral_norm_sq(wide) ==
        doctest::Approx(oracles::svd_spectral_norm_sq(wide)).epsilon(1e-10));
  // repeated top eigenvalue: Rayleigh quotient is exact from the start
  CHECK(spectral_norm_sq(3.0 * Eigen::MatrixXd::Identity(6, 6)) ==
        doctest::Approx(9.0));
}

TEST_CASE("optimal_block_size") {
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(8, 8);
  CHECK(optimal_block_size(eye) == 8);

  // all rows the same unit vector: sigma_max^2 = m, so tau* = 1
  Eigen::MatrixXd same(6, 3);
  for (int i = 0; i < 6; ++i) same.row(i) << 1, 0, 0;
  CHECK(optimal_block_size(same) == 1);

  SplitMix64 rng(13);
  Eigen::MatrixXd a = oracles::random_matrix(rng, 400, 100);
  for (int i = 0; i < 400; ++i) a.row(i) /= a.row(i).norm();
  const int expected = std::clamp(
      static_cast<int>(std::floor(400.0 / oracles::svd_spectral_norm_sq(a))), 1,
      400);
  CHECK(optimal_block_size(a) == expected);

  Eigen::MatrixXd unnormalized(2, 2);
  unnormalized << 2, 0, 0, 1;
  CHECK_THROWS_AS(optimal_block_size(unnormalized), std::invalid_argument);
}

TEST_CASE("sampler determinism and modes") {
  SamplerConfig cfg;
  cfg.mode = SamplingMode::UniformNoReplacement;
  cfg.tau = 4;
  cfg.seed = 99;
  Sampler s1(cfg, 20);
  Sampler s2(cfg, 20);
  for (int i = 0; i < 30; ++i) {
    CHECK(s1.next().indices == s2.next().indices);
  }

  cfg.mode = SamplingMode::Partition;
  Sampler p1(cfg, 22);
  Sampler p2(cfg, 22);
  CHECK(p1.partition().blocks == p2.partition().blocks);
  CHECK(p1.partition().blocks.size() == 5);  // floor(22/4), last block size 6
  CHECK(p1.partition().blocks.back().size() == 6);
  for (int i = 0; i < 30; ++i) {
    const MiniBatch a = p1.next();
    const MiniBatch b = p2.next();
    CHECK(a.indices == b.indices);
    a.validate(22);
  }
}

TEST_CASE("rng stream basics") {
  SplitMix64 a(123);
  SplitMix64 b(123);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  SplitMix64 g(5);
  for (int i = 0; i < 1000; ++i) {
    const double u = g.next_open_double();
    CHECK(u > 0.0);
    CHECK(u <= 1.0);
  }
  // gaussian moments, loose statistical bounds
  SplitMix64 h(6);
  double sum = 0.0, sum_sq = 0.0;
  const int count = 100000;
  for (int i = 0; i < count; ++i) {
    const double z = h.gaussian();
    sum += z;
    sum_sq += z * z;
  }
  CHECK(std::abs(sum / count) < 0.02);
  CHECK(std::abs(sum_sq / count - 1.0) < 0.03);
}
