#include <gtest/gtest.h>

#include <algorithm>
#include <map>

#include "pbm/frequency.hpp"
#include "pbm/stats.hpp"

using pbm::MassPartition;
using pbm::NuMeasure;
using pbm::SetPartition;

namespace {

SetPartition P(std::vector<pbm::Block> blocks) { return SetPartition::from_blocks(std::move(blocks)); }

// every sigma_1 x ... x sigma_k for k rows
std::vector<pbm::BlockPermutationDraw> all_draws(int k) {
  std::vector<std::vector<int>> perms;
  std::vector<int> p(static_cast<std::size_t>(k));
  std::iota(p.begin(), p.end(), 0);
  do perms.push_back(p);
  while (std::next_permutation(p.begin(), p.end()));
  std::vector<pbm::BlockPermutationDraw> out{{}};
  for (int i = 0; i < k; ++i) {
    std::vector<pbm::BlockPermutationDraw> next;
    for (const auto& d : out)
      for (const auto& q : perms) {
        auto e = d;
        e.sigmas.push_back(q);
        next.push_back(std::move(e));
      }
    out = std::move(next);
  }
  return out;
}

std::map<std::vector<double>, int> output_law(const MassPartition& x, const std::vector<MassPartition>& draws, int k) {
  std::map<std::vector<double>, int> law;
  for (const auto& d : all_draws(k)) {
    auto y = pbm::mass_step(x, draws, d).masses();
    for (auto& v : y) v = std::round(v * 1e12) / 1e12;
    ++law[y];
  }
  return law;
}

}  // namespace

TEST(MassStep, SingleRow) {
  const auto x = MassPartition::ranked({1.0, 0.0, 0.0});
  const std::vector<MassPartition> draws{MassPartition::ranked({0.5, 0.3, 0.2}), MassPartition::ranked({1.0, 0.0, 0.0}),
                                         MassPartition::ranked({0.4, 0.4, 0.2})};
  for (const auto& d : all_draws(3)) EXPECT_EQ(pbm::mass_step(x, draws, d), draws[0]);
}

TEST(MassStep, AllPointMassesTwoColumns) {
  const auto x = MassPartition::ranked({0.5, 0.5});
  const std::vector<MassPartition> draws(2, MassPartition::ranked({1.0, 0.0}));
  const auto law = output_law(x, draws, 2);
  ASSERT_EQ(law.size(), 2u);
  EXPECT_EQ(law.at({1.0, 0.0}), 2);
  EXPECT_EQ(law.at({0.5, 0.5}), 2);
}

TEST(MassStep, ConservesMassAndRank) {
  pbm::RngStream rng(1);
  const auto nu = NuMeasure::pitman_dirichlet(0.7, 4);
  MassPartition x = MassPartition::ranked({0.25, 0.25, 0.25, 0.25});
  for (int step = 0; step < 10000; ++step) {
    std::vector<MassPartition> draws;
    for (int i = 0; i < 4; ++i) draws.push_back(pbm::sample_nu(nu, rng));
    x = pbm::mass_step(x, draws, pbm::BlockPermutationDraw::sample(4, 4, rng));
    double sum = 0.0;
    for (int i = 0; i < 4; ++i) sum += x[i];
    ASSERT_NEAR(sum, 1.0, 1e-12);
    ASSERT_TRUE(std::is_sorted(x.masses().rbegin(), x.masses().rend()));
  }
}

// Permuting the coordinates of a draw is absorbed by the uniform sigma: the
// law of the output over all sigmas is unchanged. Checked exactly.
TEST(MassStep, ColumnLabelsExchangeable) {
  const int k = 3;
  const auto x = MassPartition::ranked({0.5, 0.3, 0.2});
  const std::vector<MassPartition> draws{MassPartition::ranked({0.6, 0.3, 0.1}), MassPartition::ranked({0.5, 0.5, 0.0}),
                                         MassPartition::ranked({0.9, 0.1, 0.0})};
  const auto base = output_law(x, draws, k);
  // composing sigma_i with a fixed relabeling pi_i of the draw's coordinates
  const std::vector<std::vector<int>> pis{{2, 0, 1}, {1, 0, 2}, {0, 2, 1}};
  std::map<std::vector<double>, int> moved;
  for (const auto& d : all_draws(k)) {
    auto e = d;
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) e.sigmas[i][j] = pis[i][d.sigmas[i][j]];
    auto y = pbm::mass_step(x, draws, e).masses();
    for (auto& v : y) v = std::round(v * 1e12) / 1e12;
    ++moved[y];
  }
  EXPECT_EQ(base, moved);
}

TEST(SimulateMassProcess, ZeroRate) {
  pbm::RngStream rng(2);
  const auto x0 = MassPartition::ranked({0.6, 0.4});
  const auto path = pbm::simulate_mass_process(x0, NuMeasure::pitman_dirichlet(1.0, 2), 2, 0.0, 100.0, rng);
  EXPECT_TRUE(path.jumps.empty());
  EXPECT_EQ(path.state_at(50.0), x0);
}

TEST(SimulateMassProcess, DegenerateNuAbsorbs) {
  // (1,0) draws send each row whole to a uniform column; (1,0) is absorbing
  pbm::RngStream rng(3);
  const auto nu = NuMeasure::point_mass(MassPartition::ranked({1.0, 0.0}));
  const auto one = MassPartition::ranked({1.0, 0.0});
  for (int r = 0; r < 200; ++r) {
    const auto path = pbm::simulate_mass_process(MassPartition::ranked({0.7, 0.3}), nu, 2, 1.0, 50.0, rng);
    bool absorbed = false;
    for (const auto& [t, x] : path.jumps) {
      if (absorbed) {
        ASSERT_EQ(x, one);
      } else {
        absorbed = x == one;
        if (!absorbed) {
          ASSERT_EQ(x, MassPartition::ranked({0.7, 0.3}));
        }
      }
    }
    EXPECT_TRUE(absorbed);
  }
}

TEST(EmpiricalFrequencies, Examples) {
  EXPECT_EQ(pbm::empirical_frequencies(SetPartition::one_block(5), 3), (std::vector<double>{1.0, 0.0, 0.0}));
  const auto f = pbm::empirical_frequencies(P({{1, 2}, {3}}), 2);
  EXPECT_DOUBLE_EQ(f[0], 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(f[1], 1.0 / 3.0);
  EXPECT_THROW(pbm::empirical_frequencies(P({{1}, {2}, {3}}), 2), pbm::dimension_error);
}

TEST(EmpiricalFrequencies, LawOfLargeNumbers) {
  pbm::RngStream rng(4);
  const auto s = MassPartition::ranked({0.5, 0.3, 0.2});
  const int n = 100000;
  for (int r = 0; r < 20; ++r) {
    const auto b = pbm::paintbox_sample(s, n, rng).first;
    // each coordinate has sd <= 0.5/sqrt(n) = 0.0016
    EXPECT_LT(pbm::sup_distance(pbm::empirical_frequencies(b, 3), s.masses()), 0.01);
  }
}

TEST(CoupledSetMass, ZeroRateIsConstant) {
  pbm::RngStream rng(5);
  const auto run = pbm::coupled_set_mass(50, MassPartition::ranked({0.5, 0.5}), NuMeasure::pitman_dirichlet(1.0, 2), 2,
                                         0.0, 10.0, rng);
  EXPECT_TRUE(run.set.jumps.empty());
  EXPECT_TRUE(run.mass.jumps.empty());
  EXPECT_EQ(run.times.size(), 1u);
}

TEST(CoupledSetMass, DegenerateNuAbsorbsBoth) {
  pbm::RngStream rng(6);
  const auto nu = NuMeasure::point_mass(MassPartition::ranked({1.0, 0.0}));
  const auto run = pbm::coupled_set_mass(200, MassPartition::ranked({0.5, 0.5}), nu, 2, 1.0, 60.0, rng);
  EXPECT_EQ(run.mass.state_at(60.0), MassPartition::ranked({1.0, 0.0}));
  EXPECT_EQ(run.set.state_at(60.0), SetPartition::one_block(200));
}

TEST(CoupledSetMass, ErrorShrinksWithN) {
  const auto nu = NuMeasure::pitman_dirichlet(1.0, 2);
  const auto x0 = MassPartition::ranked({0.5, 0.5});
  std::vector<double> small, large;
  for (std::uint64_t r = 0; r < 30; ++r) {
    pbm::RngStream a(7, r), b(8, r);
    small.push_back(pbm::coupled_set_mass(100, x0, nu, 2, 1.0, 3.0, a).max_error());
    large.push_back(pbm::coupled_set_mass(10000, x0, nu, 2, 1.0, 3.0, b).max_error());
  }
  std::sort(small.begin(), small.end());
  std::sort(large.begin(), large.end());
  EXPECT_LT(large[15], small[15]);
  EXPECT_LT(large.back(), 0.05);
}

// The column totals of the coupled run are exactly the masses the set process samples from.
TEST(CoupledSetMass, MassPathIsAMassProcess) {
  pbm::RngStream rng(9);
  const auto run = pbm::coupled_set_mass(10, MassPartition::ranked({0.4, 0.35, 0.25}), NuMeasure::pitman_dirichlet(2.0, 3),
                                         3, 2.0, 5.0, rng);
  ASSERT_EQ(run.times.size(), run.mass.jumps.size() + 1);
  for (const auto& [t, x] : run.mass.jumps) {
    double sum = 0.0;
    for (int i = 0; i < x.size(); ++i) sum += x[i];
    EXPECT_NEAR(sum, 1.0, 1e-12);
  }
}

TEST(Stats, KolmogorovSmirnov) {
  // evenly spread sample against its own uniform law
  std::vector<pbm::stats::WeightedSample> sample;
  for (int i = 0; i < 1000; ++i) sample.push_back({(i + 0.5) / 1000.0, 1.0});
  const auto uniform = [](double x) { return std::clamp(x, 0.0, 1.0); };
  EXPECT_NEAR(pbm::stats::ks_statistic(sample, uniform), 0.0005, 1e-12);
  // the 5% critical value of the Kolmogorov distribution is about 1.358
  EXPECT_NEAR(pbm::stats::ks_pvalue(1.358 / (std::sqrt(400.0) + 0.12 + 0.11 / 20.0), 400.0), 0.05, 1e-3);
  EXPECT_DOUBLE_EQ(pbm::stats::ks_pvalue(0.0, 100.0), 1.0);
  // weights count as repeated observations
  std::vector<pbm::stats::WeightedSample> weighted{{0.25, 3.0}, {0.75, 1.0}};
  EXPECT_NEAR(pbm::stats::ks_statistic(weighted, uniform), 0.5, 1e-12);
}

TEST(Stats, TimeWeightedCoordinate) {
  pbm::MassTrajectory path{MassPartition::ranked({0.5, 0.5}),
                           {{1.0, MassPartition::ranked({0.8, 0.2})}, {3.0, MassPartition::ranked({0.6, 0.4})}}};
  const auto w = pbm::stats::time_weighted_coordinate(path, 0, 0.5, 4.0);
  ASSERT_EQ(w.size(), 3u);
  EXPECT_DOUBLE_EQ(w[0].value, 0.5);
  EXPECT_DOUBLE_EQ(w[0].weight, 0.5);
  EXPECT_DOUBLE_EQ(w[1].value, 0.8);
  EXPECT_DOUBLE_EQ(w[1].weight, 2.0);
  EXPECT_DOUBLE_EQ(w[2].weight, 1.0);
}

TEST(SimulateMassProcess, EquilibriumFirstCoordinate) {
  // time-averaged s_1 after burn-in against the ranked Dirichlet(alpha, alpha) law
  for (double alpha : {1.0, 2.0}) {
    pbm::RngStream rng(10, static_cast<std::uint64_t>(alpha));
    const double horizon = 500.0;
    const auto path = pbm::simulate_mass_process(MassPartition::ranked({0.5, 0.5}), NuMeasure::pitman_dirichlet(alpha, 2), 2,
                                                 1.0, horizon, rng);
    const auto sample = pbm::stats::time_weighted_coordinate(path, 0, horizon / 2, horizon);
    // P(max(U, 1-U) <= x) = I(x) - I(1-x), I the Beta(alpha, alpha) cdf (alpha = 1, 2)
    const auto beta_cdf = [alpha](double u) { return alpha == 1.0 ? u : 3 * u * u - 2 * u * u * u; };
    const auto cdf = [&](double x) { return x < 0.5 ? 0.0 : beta_cdf(x) - beta_cdf(1.0 - x); };
    const double d = pbm::stats::ks_statistic(sample, cdf);
    const double p = pbm::stats::ks_pvalue(d, static_cast<double>(sample.size()));
    EXPECT_GT(p, 0.01) << "alpha " << alpha << " D " << d << " n " << sample.size();
  }
}
