#pragma once

// Ranked frequencies of set partitions and the measure-valued process X(t) on
// the ranked k-simplex, alone or coupled with the set-valued process.

#include <algorithm>
#include <iterator>
#include <cmath>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "pbm/ctmc.hpp"
#include "pbm/errors.hpp"
#include "pbm/kernel.hpp"
#include "pbm/mass_partition.hpp"
#include "pbm/partition.hpp"
#include "pbm/rng.hpp"

namespace pbm {

struct MassTrajectory {
  using Point = std::pair<double, MassPartition>;

  MassPartition initial;
  std::vector<Point> jumps;

  const MassPartition& state_at(double t) const {
    auto it = std::upper_bound(jumps.begin(), jumps.end(), t,
                               [](double x, const Point& p) { return x < p.first; });
    return it == jumps.begin() ? initial : std::prev(it)->second;
  }
};

// Column totals y_j = sum_i x_i P^i_{sigma_i(j)}, unranked.
inline std::vector<double> column_totals(std::span<const double> x, std::span<const MassPartition> draws,
                                         const BlockPermutationDraw& draw) {
  const auto k = x.size();
  if (draws.size() < k || draw.sigmas.size() < k) throw dimension_error("mass_step: need k draws and k permutations");
  std::vector<double> y(k, 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    if (x[i] == 0.0) continue;
    if (static_cast<std::size_t>(draws[i].size()) != k) throw dimension_error("mass_step: draw is not on the k-simplex");
    for (std::size_t j = 0; j < k; ++j) y[j] += x[i] * draws[i][draw.sigmas[i][j]];
  }
  return y;
}

// X(t) = (sum_i x_i P^i_{sigma_i(j)}, 1 <= j <= k) ranked.
inline MassPartition mass_step(const MassPartition& x, std::span<const MassPartition> draws,
                               const BlockPermutationDraw& draw) {
  return rank(column_totals(x.masses(), draws, draw));
}

namespace detail {

inline std::vector<MassPartition> sample_rows(const NuMeasure& nu, int k, RngStream& rng) {
  std::vector<MassPartition> draws;
  draws.reserve(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) draws.push_back(sample_nu(nu, rng).padded(k));
  return draws;
}

}  // namespace detail

inline MassTrajectory simulate_mass_process(const MassPartition& x0, const NuMeasure& nu, int k, double lambda,
                                            double horizon, RngStream& rng) {
  if (lambda < 0.0) throw domain_error("simulate_mass_process: lambda must be nonnegative");
  if (nu.dimension() > k) throw dimension_error("simulate_mass_process: nu is not supported on the ranked k-simplex");
  MassTrajectory path{x0.padded(k), {}};
  if (lambda == 0.0) return path;
  MassPartition x = path.initial;
  for (double t = rng.exponential(lambda); t <= horizon; t += rng.exponential(lambda)) {
    const auto draws = detail::sample_rows(nu, k, rng);
    const auto sigmas = BlockPermutationDraw::sample(k, k, rng);
    x = mass_step(x, draws, sigmas);
    path.jumps.emplace_back(t, x);
  }
  return path;
}

// Ranked block sizes over n, zero-padded to k coordinates.
inline std::vector<double> empirical_frequencies(const SetPartition& b, int k) {
  if (b.block_count() > k) throw dimension_error("empirical_frequencies: more than k blocks");
  std::vector<double> f(static_cast<std::size_t>(k), 0.0);
  for (int i = 0; i < b.block_count(); ++i) f[i] = static_cast<double>(b.block(i).size()) / b.size();
  std::sort(f.begin(), f.end(), std::greater<>());
  return f;
}

inline double sup_distance(std::span<const double> a, std::span<const double> b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

struct CoupledSetMass {
  Trajectory set;
  MassTrajectory mass;
  // Recorded times (0 and every event) and the sup-distance between the
  // ranked empirical frequencies of the set state and X at those times.
  std::vector<double> times;
  std::vector<double> sup_errors;

  double max_error() const { return sup_errors.empty() ? 0.0 : *std::max_element(sup_errors.begin(), sup_errors.end()); }
};

// One event stream drives both processes. Columns keep their labels across
// events so that row i of the mass matrix is the block holding column i: at an
// event every element of row i is painted from the same draw P'_i that feeds
// the mass step, and lands in column j with sigma_i(j) equal to its color.
inline CoupledSetMass coupled_set_mass(int n, const MassPartition& x0, const NuMeasure& nu, int k, double lambda,
                                       double horizon, RngStream& rng) {
  if (n < 1) throw domain_error("coupled_set_mass: n must be positive");
  if (lambda < 0.0) throw domain_error("coupled_set_mass: lambda must be nonnegative");
  if (nu.dimension() > k) throw dimension_error("coupled_set_mass: nu is not supported on the ranked k-simplex");
  const auto start = x0.padded(k);
  std::vector<double> y = start.masses();
  std::vector<int> column(static_cast<std::size_t>(n));
  for (auto& c : column) c = static_cast<int>(rng.categorical(y));

  CoupledSetMass out;
  out.set.initial = SetPartition::from_labels(column);
  out.mass.initial = start;
  auto record = [&](double t) {
    out.times.push_back(t);
    const auto f = empirical_frequencies(SetPartition::from_labels(column), k);
    out.sup_errors.push_back(sup_distance(f, rank(y).masses()));
  };
  record(0.0);
  if (lambda == 0.0) return out;

  SetPartition state = out.set.initial;
  std::vector<std::vector<int>> inverse(static_cast<std::size_t>(k), std::vector<int>(static_cast<std::size_t>(k)));
  for (double t = rng.exponential(lambda); t <= horizon; t += rng.exponential(lambda)) {
    const auto draws = detail::sample_rows(nu, k, rng);
    const auto sigmas = BlockPermutationDraw::sample(k, k, rng);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) inverse[i][sigmas.sigmas[i][j]] = j;
    for (auto& c : column) {
      const int row = c;
      const int color = static_cast<int>(rng.categorical(draws[row].masses()));
      c = inverse[row][color];
    }
    y = column_totals(y, draws, sigmas);
    auto next = SetPartition::from_labels(column);
    if (next != state) {
      out.set.jumps.emplace_back(t, next);
      state = std::move(next);
    }
    out.mass.jumps.emplace_back(t, rank(y));
    record(t);
  }
  return out;
}

}  // namespace pbm
