#include <gtest/gtest.h>

#include "oracles.hpp"
#include "pbm/ctmc.hpp"
#include "pbm/stats.hpp"

using pbm::MassPartition;
using pbm::NuMeasure;
using pbm::SetPartition;

namespace {

SetPartition P(std::vector<pbm::Block> blocks) { return SetPartition::from_blocks(std::move(blocks)); }

const NuMeasure kMixture =
    NuMeasure::discrete({{0.5, MassPartition::ranked({0.6, 0.4})}, {0.5, MassPartition::ranked({1.0, 0.0})}});

}  // namespace

TEST(RateMatrix, Examples) {
  const auto kernel = pbm::build_kernel_alpha_k(2, 2, 1.0);
  const auto q = pbm::build_rate_matrix(kernel, 1.0);
  Eigen::Matrix2d want;
  want << -0.25, 0.25, 0.5, -0.5;
  EXPECT_LT((q.rates - want).cwiseAbs().maxCoeff(), 1e-15);
  const auto q2 = pbm::build_rate_matrix(kernel, 2.0);
  EXPECT_LT((q2.rates - 2.0 * want).cwiseAbs().maxCoeff(), 1e-15);
  const auto q1 = pbm::build_rate_matrix(pbm::build_kernel_alpha_k(1, 2, 1.0), 3.0);
  EXPECT_EQ(q1.rates(0, 0), 0.0);
  EXPECT_THROW(pbm::build_rate_matrix(kernel, 0.0), pbm::domain_error);
}

TEST(RateMatrix, RowsSumToZero) {
  for (int n = 1; n <= 4; ++n)
    for (double lambda : {1.0, 7.0}) {
      const auto q = pbm::build_rate_matrix(pbm::build_kernel(n, 3, kMixture), lambda);
      EXPECT_LT(pbm::max_row_sum_defect(q.rates, 0.0), 1e-10);
    }
}

TEST(RateConsistency, Grid) {
  for (int n = 1; n <= 4; ++n)
    for (double lambda : {1.0, 7.0}) {
      EXPECT_LT(pbm::check_rate_consistency(n, pbm::ChainModel::alpha_k(1.0, 2), lambda), 1e-10);
      EXPECT_LT(pbm::check_rate_consistency(n, 2, kMixture, lambda), 1e-10);
      EXPECT_LT(pbm::check_rate_consistency(n, 3, NuMeasure::pitman_dirichlet(0.5, 3), lambda), 1e-10);
    }
}

TEST(GeneratorResidual, Stationary) {
  for (int n = 1; n <= 4; ++n) {
    const auto kernel = pbm::build_kernel_alpha_k(n, 2, 1.0);
    const auto q = pbm::build_rate_matrix(kernel, 1.0);
    EXPECT_LT(pbm::generator_residual(pbm::solve_stationary(kernel), q), 1e-10);
  }
}

TEST(TransientDistribution, MatchesScalingAndSquaring) {
  for (double lambda : {1.0, 7.0, 40.0})
    for (double t : {0.0, 0.5, 2.0, 10.0}) {
      const auto q = pbm::build_rate_matrix(pbm::build_kernel(4, 3, kMixture), lambda);
      const Eigen::MatrixXd expm = oracle::expm(q.rates * t);
      for (std::size_t s = 0; s < q.size(); s += 3) {
        const auto row = pbm::transient_distribution(q, s, t);
        for (std::size_t j = 0; j < q.size(); ++j) EXPECT_NEAR(row[j], expm(s, j), 1e-10);
      }
    }
}

TEST(Trajectory, StateAt) {
  pbm::Trajectory path{P({{1, 2}}), {{1.0, P({{1}, {2}})}, {2.5, P({{1, 2}})}}, {}};
  EXPECT_EQ(path.state_at(0.0), P({{1, 2}}));
  EXPECT_EQ(path.state_at(0.999), P({{1, 2}}));
  EXPECT_EQ(path.state_at(1.0), P({{1}, {2}}));
  EXPECT_EQ(path.state_at(3.0), P({{1, 2}}));
}

TEST(SimulateEmbedded, AbsorbingStateNeverLeaves) {
  const auto nu = NuMeasure::point_mass(MassPartition::ranked({1.0, 0.0}));
  const auto q = pbm::build_rate_matrix(pbm::build_kernel(3, 2, nu), 1.0);
  pbm::RngStream rng(1);
  for (int r = 0; r < 100; ++r) EXPECT_TRUE(pbm::simulate_embedded(SetPartition::one_block(3), q, 100.0, rng).jumps.empty());
}

TEST(SimulateEmbedded, MeanHoldFromOneBlock) {
  const auto q = pbm::build_rate_matrix(pbm::build_kernel_alpha_k(2, 2, 1.0), 1.0);
  pbm::RngStream rng(2);
  const int reps = 20000;
  double sum = 0.0;
  for (int r = 0; r < reps; ++r) {
    // P(no jump by t = 200) = exp(-50)
    const auto path = pbm::simulate_embedded(P({{1, 2}}), q, 200.0, rng);
    ASSERT_FALSE(path.jumps.empty());
    sum += path.jumps.front().first;
  }
  // exponential with mean 4: sd 4
  EXPECT_LT(std::abs(sum / reps - 4.0), 4.0 * 4.0 / std::sqrt(reps));
}

TEST(SimulateEmbedded, JumpCountFromStationarity) {
  const int n = 3;
  const double lambda = 2.0, horizon = 5.0;
  const auto kernel = pbm::build_kernel_alpha_k(n, 2, 1.0);
  const auto theta = pbm::solve_stationary(kernel);
  const auto q = pbm::build_rate_matrix(kernel, lambda);
  double expected = 0.0;
  for (std::size_t i = 0; i < kernel.size(); ++i) expected += theta.weights[i] * (1.0 - kernel.probs(i, i));
  expected *= lambda * horizon;
  pbm::RngStream rng(3);
  const int reps = 20000;
  double sum = 0.0, sum2 = 0.0;
  for (int r = 0; r < reps; ++r) {
    const auto start = kernel.space[rng.categorical(theta.weights)];
    const double jumps = static_cast<double>(pbm::simulate_embedded(start, q, horizon, rng).jumps.size());
    sum += jumps;
    sum2 += jumps * jumps;
  }
  const double mean = sum / reps, se = std::sqrt((sum2 / reps - mean * mean) / reps);
  EXPECT_LT(std::abs(mean - expected), 4.0 * se);
}

TEST(SimulatePoissonian, ZeroRateIsConstant) {
  pbm::RngStream rng(4);
  const auto path = pbm::simulate_poissonian(P({{1}, {2, 3}}), kMixture, 2, 0.0, 100.0, rng, true);
  EXPECT_TRUE(path.jumps.empty());
  EXPECT_TRUE(path.events.empty());
  EXPECT_THROW(pbm::simulate_poissonian(P({{1}, {2}, {3}}), kMixture, 2, 1.0, 1.0, rng), pbm::state_error);
}

TEST(SimulatePoissonian, ThinningRate) {
  // effective jumps out of B occur at rate lambda (1 - p(B,B))
  const double lambda = 3.0;
  const auto kernel = pbm::build_kernel(3, 2, kMixture);
  pbm::RngStream rng(5);
  for (std::size_t i = 0; i < kernel.size(); ++i) {
    const auto& b = kernel.space[i];
    const int reps = 5000;
    const double mean = 1.0 / (lambda * (1.0 - kernel.probs(i, i)));
    double sum = 0.0;
    for (int r = 0; r < reps; ++r) {
      const auto path = pbm::simulate_poissonian(b, kMixture, 2, lambda, 40.0 * mean, rng);
      ASSERT_FALSE(path.jumps.empty());
      sum += path.jumps.front().first;
    }
    EXPECT_LT(std::abs(sum / reps - mean), 4.0 * mean / std::sqrt(reps)) << b.to_string();
  }
}

TEST(SimulatePoissonian, EventLogRecordsSelfTransitions) {
  pbm::RngStream rng(6);
  const auto path = pbm::simulate_poissonian(P({{1, 2}, {3}}), kMixture, 2, 5.0, 20.0, rng, true);
  ASSERT_FALSE(path.events.empty());
  EXPECT_GE(path.events.size(), path.jumps.size());
  // jumps are exactly the events that change the state
  SetPartition state = path.initial;
  std::size_t j = 0;
  for (const auto& [t, b] : path.events) {
    if (b != state) {
      ASSERT_LT(j, path.jumps.size());
      EXPECT_EQ(path.jumps[j].first, t);
      EXPECT_EQ(path.jumps[j].second, b);
      ++j;
      state = b;
    }
  }
  EXPECT_EQ(j, path.jumps.size());
}

TEST(Drivers, MatchMatrixExponential) {
  const auto kernel = pbm::build_kernel_alpha_k(2, 2, 1.0);
  const auto q = pbm::build_rate_matrix(kernel, 1.0);
  const auto nu = NuMeasure::pitman_dirichlet(1.0, 2);
  const auto start = P({{1, 2}});
  const int reps = 100000;
  for (double t : {0.5, 1.0, 2.0}) {
    const Eigen::MatrixXd expm = oracle::expm(q.rates * t);
    std::vector<int> embedded(2, 0), poisson(2, 0);
    pbm::RngStream rng(7, static_cast<std::uint64_t>(t * 10));
    for (int r = 0; r < reps; ++r) {
      ++embedded[q.index_of(pbm::simulate_embedded(start, q, t, rng).state_at(t))];
      ++poisson[q.index_of(pbm::simulate_poissonian(start, nu, 2, 1.0, t, rng).state_at(t))];
    }
    for (std::size_t j = 0; j < 2; ++j) {
      EXPECT_LT(pbm::stats::standard_errors(embedded[j] / double(reps), expm(0, j), reps), 4.0);
      EXPECT_LT(pbm::stats::standard_errors(poisson[j] / double(reps), expm(0, j), reps), 4.0);
    }
  }
}

TEST(CoupledPair, EqualStartsGiveEqualPaths) {
  pbm::RngStream rng(8);
  const auto b = P({{1, 3}, {2}, {4}});
  const auto [a, c] = pbm::coupled_pair(b, b, NuMeasure::pitman_dirichlet(1.0, 3), 3, 2.0, 10.0, rng);
  EXPECT_EQ(a.jumps, c.jumps);
  EXPECT_EQ(a.events, c.events);
}

TEST(CoupledPair, RestrictionsAgree) {
  pbm::RngStream rng(9);
  const auto nu = NuMeasure::pitman_dirichlet(1.0, 2);
  int checked = 0;
  for (int r = 0; r < 1000; ++r) {
    const auto a = pbm::paintbox_sample_nu(nu, 4, rng);
    const auto ext = pbm::extensions(pbm::restrict(a, 3), 2);
    const auto& b = ext[rng.below(static_cast<int>(ext.size()))];
    const auto [pa, pb] = pbm::coupled_pair(a, b, nu, 2, 1.0, 5.0, rng);
    ASSERT_EQ(pa.events.size(), pb.events.size());
    for (std::size_t e = 0; e < pa.events.size(); ++e) {
      ASSERT_EQ(pbm::restrict(pa.events[e].second, 3), pbm::restrict(pb.events[e].second, 3));
      ++checked;
    }
  }
  EXPECT_GT(checked, 1000);
}

TEST(EventStream, Reproducible) {
  pbm::RngStream a(10, 2), b(10, 2);
  const auto s1 = pbm::generate_event_stream(kMixture, 5, 3, 2.0, 10.0, a);
  const auto s2 = pbm::generate_event_stream(kMixture, 5, 3, 2.0, 10.0, b);
  ASSERT_EQ(s1.events.size(), s2.events.size());
  for (std::size_t i = 0; i < s1.events.size(); ++i) {
    EXPECT_EQ(s1.events[i].time, s2.events[i].time);
    EXPECT_EQ(s1.events[i].rows, s2.events[i].rows);
    EXPECT_EQ(s1.events[i].draw.sigmas, s2.events[i].draw.sigmas);
  }
  const auto start = SetPartition::one_block(5);
  EXPECT_EQ(pbm::drive(start, s1).jumps, pbm::drive(start, s2).jumps);
}
