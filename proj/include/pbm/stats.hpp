#pragma once

// Goodness-of-fit helpers for the Monte Carlo checks.

#include <algorithm>
#include <cmath>
#include <functional>
#include <utility>
#include <vector>

#include "pbm/frequency.hpp"

namespace pbm::stats {

// |p_hat - p| in units of the binomial standard error sqrt(p (1 - p) / reps).
// A zero standard error counts any discrepancy as infinitely many errors.
inline double standard_errors(double p_hat, double p, std::size_t reps) {
  const double se = std::sqrt(std::max(p * (1.0 - p), 0.0) / static_cast<double>(reps));
  const double diff = std::abs(p_hat - p);
  if (se == 0.0) return diff == 0.0 ? 0.0 : HUGE_VAL;
  return diff / se;
}

struct WeightedSample {
  double value;
  double weight;
};

// sup_x |F_w(x) - F(x)| for the weighted empirical law F_w.
inline double ks_statistic(std::vector<WeightedSample> sample, const std::function<double(double)>& cdf) {
  std::sort(sample.begin(), sample.end(), [](const auto& a, const auto& b) { return a.value < b.value; });
  double total = 0.0;
  for (const auto& s : sample) total += s.weight;
  double below = 0.0;
  double worst = 0.0;
  for (std::size_t i = 0; i < sample.size();) {
    const double x = sample[i].value;
    double at = 0.0;
    for (; i < sample.size() && sample[i].value == x; ++i) at += sample[i].weight;
    const double f = cdf(x);
    worst = std::max({worst, std::abs(below / total - f), std::abs((below + at) / total - f)});
    below += at;
  }
  return worst;
}

// Asymptotic Kolmogorov p-value with Stephens' small-sample correction.
inline double ks_pvalue(double d, double n_effective) {
  const double root = std::sqrt(n_effective);
  const double lambda = (root + 0.12 + 0.11 / root) * d;
  if (lambda < 1e-3) return 1.0;
  double sum = 0.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = std::exp(-2.0 * j * j * lambda * lambda);
    sum += (j % 2 ? 1.0 : -1.0) * term;
    if (term < 1e-18) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

// Coordinate `coord` of X(t) on [from, to], each state weighted by its holding time.
inline std::vector<WeightedSample> time_weighted_coordinate(const MassTrajectory& path, int coord, double from,
                                                            double to) {
  std::vector<WeightedSample> out;
  double t = from;
  const MassPartition* state = &path.state_at(from);
  for (const auto& [time, x] : path.jumps) {
    if (time <= from) continue;
    if (time >= to) break;
    out.push_back({(*state)[coord], time - t});
    t = time;
    state = &x;
  }
  out.push_back({(*state)[coord], to - t});
  return out;
}

}  // namespace pbm::stats
