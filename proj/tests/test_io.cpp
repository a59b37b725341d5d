#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "pbm/io.hpp"

using pbm::MassPartition;
using pbm::NuMeasure;
using pbm::SetPartition;
namespace io = pbm::io;

TEST(Io, PartitionRoundTrip) {
  for (const auto& b : pbm::enumerate(5, 5)) {
    const auto j = io::to_json(b);
    EXPECT_EQ(io::partition_from_json(io::json::parse(j.dump())), b);
  }
  EXPECT_EQ(io::to_json(SetPartition::from_blocks({{2, 3}, {1}})).dump(), R"({"blocks":[[1],[2,3]],"n":3})");
}

TEST(Io, MassAndNuRoundTrip) {
  const auto s = MassPartition::ranked({0.5, 0.3, 0.2});
  EXPECT_EQ(io::mass_from_json(io::to_json(s)), s);

  const auto pd = NuMeasure::pitman_dirichlet(1.5, 3);
  const auto back = io::nu_from_json(io::json::parse(io::to_json(pd).dump()));
  ASSERT_FALSE(back.is_discrete());
  EXPECT_EQ(back.as_pitman_dirichlet().alpha, 1.5);
  EXPECT_EQ(back.as_pitman_dirichlet().k, 3);

  const auto mix = NuMeasure::discrete({{0.25, MassPartition::ranked({0.6, 0.4})}, {0.75, MassPartition::ranked({1.0, 0.0})}});
  const auto mix_back = io::nu_from_json(io::to_json(mix));
  ASSERT_TRUE(mix_back.is_discrete());
  ASSERT_EQ(mix_back.as_discrete().atoms.size(), 2u);
  EXPECT_EQ(mix_back.as_discrete().atoms[0].weight, 0.25);
  EXPECT_EQ(mix_back.as_discrete().atoms[1].point, MassPartition::ranked({1.0, 0.0}));
}

TEST(Io, KernelAndStationaryRoundTrip) {
  const auto kernel = pbm::build_kernel_alpha_k(3, 2, 1.0);
  const auto back = io::kernel_from_json(io::json::parse(io::to_json(kernel).dump()));
  EXPECT_EQ(back.states(), kernel.states());
  EXPECT_EQ(back.probs, kernel.probs);  // nlohmann dumps doubles round-trip exact
  EXPECT_EQ(back.nondegenerate, kernel.nondegenerate);

  const auto theta = pbm::solve_stationary(kernel);
  const auto theta_back = io::stationary_from_json(io::json::parse(io::to_json(theta).dump()));
  EXPECT_EQ(theta_back.weights, theta.weights);
  EXPECT_EQ(theta_back.states(), theta.states());
}

TEST(Io, TrajectoryRoundTrip) {
  pbm::RngStream rng(1);
  const auto path = pbm::simulate_poissonian(SetPartition::one_block(4), NuMeasure::pitman_dirichlet(1.0, 3), 3, 2.0, 10.0, rng);
  ASSERT_FALSE(path.jumps.empty());
  const auto back = io::trajectory_from_json(io::json::parse(io::to_json(path).dump()));
  EXPECT_EQ(back.initial, path.initial);
  EXPECT_EQ(back.jumps, path.jumps);
}

TEST(Io, MassCsvRoundTrip) {
  pbm::RngStream rng(2);
  const auto path = pbm::simulate_mass_process(MassPartition::ranked({0.5, 0.3, 0.2}), NuMeasure::pitman_dirichlet(1.0, 3), 3,
                                               1.0, 20.0, rng);
  std::stringstream buffer;
  io::write_csv(buffer, path);
  const auto back = io::mass_trajectory_from_csv(buffer);
  EXPECT_EQ(back.initial, path.initial);
  ASSERT_EQ(back.jumps.size(), path.jumps.size());
  for (std::size_t i = 0; i < path.jumps.size(); ++i) {
    EXPECT_EQ(back.jumps[i].first, path.jumps[i].first);
    EXPECT_EQ(back.jumps[i].second, path.jumps[i].second);
  }
}

TEST(Io, FormatErrors) {
  EXPECT_THROW(io::partition_from_json(io::json::parse(R"({"blocks": [[1]]})")), io::format_error);
  EXPECT_THROW(io::partition_from_json(io::json::parse(R"({"n": 3, "blocks": [[1, 2]]})")), io::format_error);
  EXPECT_THROW(io::partition_from_json(io::json::parse(R"({"n": "two", "blocks": [[1, 2]]})")), io::format_error);
  EXPECT_THROW(io::nu_from_json(io::json::parse(R"({"type": "gamma"})")), io::format_error);
  EXPECT_THROW(io::nu_from_json(io::json::parse(R"({"type": "discrete", "atoms": 3})")), io::format_error);
  EXPECT_THROW(io::kernel_from_json(io::json::parse(R"({"states": [{"n": 1, "blocks": [[1]]}], "probs": [[1, 0]]})")),
               io::format_error);
  std::stringstream empty;
  EXPECT_THROW(io::mass_trajectory_from_csv(empty), io::format_error);
  std::stringstream headless("0,1,0\n");
  EXPECT_THROW(io::mass_trajectory_from_csv(headless), io::format_error);
}

TEST(Io, LoadJson) {
  EXPECT_EQ(io::load_json(R"({"n": 1, "blocks": [[1]]})").at("n"), 1);
  EXPECT_THROW(io::load_json("/nonexistent/file.json"), io::format_error);
  EXPECT_THROW(io::load_json("{not json"), io::format_error);
  const std::string path = testing::TempDir() + "pbm_io_nu.json";
  {
    std::ofstream out(path);
    out << io::to_json(NuMeasure::pitman_dirichlet(2.0, 2)).dump();
  }
  EXPECT_EQ(io::nu_from_json(io::load_json(path)).as_pitman_dirichlet().alpha, 2.0);
  std::remove(path.c_str());
}
