#pragma once

// Stationary distributions of the finite restrictions and the structural
// checks on them.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <vector>

#include "pbm/errors.hpp"
#include "pbm/kernel.hpp"
#include "pbm/paintbox.hpp"
#include "pbm/partition.hpp"
#include "pbm/state_space.hpp"

namespace pbm {

struct StationaryDistribution {
  StateSpace space;
  std::vector<double> weights;

  int n() const { return space.n(); }
  int k() const { return space.k(); }
  std::size_t size() const { return space.size(); }
  const std::vector<SetPartition>& states() const { return space.states(); }
  double operator()(const SetPartition& b) const { return weights[space.index_of(b)]; }
};

namespace detail {

// Every state reachable from every other through positive entries.
inline bool irreducible(const Eigen::MatrixXd& p) {
  const Eigen::Index size = p.rows();
  auto reach_all = [&](bool transpose) {
    std::vector<char> seen(static_cast<std::size_t>(size), 0);
    std::queue<Eigen::Index> frontier;
    frontier.push(0);
    seen[0] = 1;
    Eigen::Index count = 1;
    while (!frontier.empty()) {
      const auto i = frontier.front();
      frontier.pop();
      for (Eigen::Index j = 0; j < size; ++j) {
        const double w = transpose ? p(j, i) : p(i, j);
        if (w > 0.0 && !seen[j]) {
          seen[j] = 1;
          ++count;
          frontier.push(j);
        }
      }
    }
    return count == size;
  };
  return reach_all(false) && reach_all(true);
}

}  // namespace detail

// theta with theta P = theta, from (P^T - I) theta = 0 with the last equation
// replaced by sum(theta) = 1. Throws uniqueness_error when nu is degenerate at
// (1, 0, ..., 0) (or, for kernels of unknown origin, when P is reducible).
inline StationaryDistribution solve_stationary(const TransitionKernel& kernel) {
  const bool unique = kernel.nondegenerate ? *kernel.nondegenerate : detail::irreducible(kernel.probs);
  if (!unique)
    throw uniqueness_error("solve_stationary: nu is degenerate at (1,0,...,0); stationary law not unique");
  const auto size = static_cast<Eigen::Index>(kernel.size());
  Eigen::MatrixXd a = kernel.probs.transpose() - Eigen::MatrixXd::Identity(size, size);
  a.row(size - 1).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(size);
  rhs(size - 1) = 1.0;
  Eigen::VectorXd theta = a.fullPivLu().solve(rhs);
  StationaryDistribution out{kernel.space, std::vector<double>(theta.data(), theta.data() + size)};
  for (auto& w : out.weights) w = std::max(w, 0.0);
  const double total = std::accumulate(out.weights.begin(), out.weights.end(), 0.0);
  for (auto& w : out.weights) w /= total;
  return out;
}

// Iterates theta <- theta P from the uniform vector; no hypothesis check.
inline StationaryDistribution stationary_power_iteration(const TransitionKernel& kernel, int max_iterations = 100000,
                                                         double tolerance = 1e-15) {
  const auto size = static_cast<Eigen::Index>(kernel.size());
  Eigen::RowVectorXd theta = Eigen::RowVectorXd::Constant(size, 1.0 / static_cast<double>(size));
  for (int it = 0; it < max_iterations; ++it) {
    Eigen::RowVectorXd next = theta * kernel.probs;
    next /= next.sum();
    const double change = (next - theta).cwiseAbs().maxCoeff();
    theta = next;
    if (change < tolerance) break;
  }
  return {kernel.space, std::vector<double>(theta.data(), theta.data() + size)};
}

// || theta P - theta ||_inf.
inline double stationary_residual(const StationaryDistribution& theta, const TransitionKernel& kernel) {
  const Eigen::Map<const Eigen::RowVectorXd> t(theta.weights.data(), static_cast<Eigen::Index>(theta.size()));
  return (t * kernel.probs - t).cwiseAbs().maxCoeff();
}

// Law of the chain after `steps` steps from state `start`.
inline std::vector<double> distribution_after(const TransitionKernel& kernel, std::size_t start, int steps) {
  const auto size = static_cast<Eigen::Index>(kernel.size());
  Eigen::RowVectorXd mu = Eigen::RowVectorXd::Zero(size);
  mu(static_cast<Eigen::Index>(start)) = 1.0;
  for (int t = 0; t < steps; ++t) mu = mu * kernel.probs;
  return {mu.data(), mu.data() + size};
}

inline double total_variation(const std::vector<double>& a, const std::vector<double>& b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += std::abs(a[i] - b[i]);
  return 0.5 * sum;
}

// max_B |theta_n(B) - sum_{B* in D^{-1}(B)} theta_{n+1}(B*)|.
inline double check_projection_consistency(const StationaryDistribution& upper, const StationaryDistribution& lower) {
  if (upper.n() != lower.n() + 1 || upper.k() != lower.k())
    throw dimension_error("projection consistency: need distributions over [n+1] and [n] with equal k");
  double worst = 0.0;
  for (std::size_t i = 0; i < lower.size(); ++i) {
    double mass = 0.0;
    for (const auto& e : extensions(lower.space[i], lower.k())) mass += upper(e);
    worst = std::max(worst, std::abs(lower.weights[i] - mass));
  }
  return worst;
}

// max over B, B' of |rho(B) p(B,B') - rho(B') p(B',B)| / max(rho(B) p(B,B'), rho(B') p(B',B))
// for the (alpha, k) family with rho the Dirichlet-multinomial law.
inline double check_detailed_balance(int n, int k, double alpha) {
  const auto kernel = build_kernel_alpha_k(n, k, alpha);
  std::vector<double> rho(kernel.size());
  for (std::size_t i = 0; i < kernel.size(); ++i) rho[i] = eppf_dirichlet_multinomial(kernel.space[i], alpha, k);
  double worst = 0.0;
  for (std::size_t i = 0; i < kernel.size(); ++i) {
    for (std::size_t j = i + 1; j < kernel.size(); ++j) {
      const double forward = rho[i] * kernel.probs(i, j);
      const double backward = rho[j] * kernel.probs(j, i);
      const double scale = std::max(forward, backward);
      if (scale > 0.0) worst = std::max(worst, std::abs(forward - backward) / scale);
    }
  }
  return worst;
}

// max over generators sigma of S_n (or all of S_n) and B of |theta(sigma B) - theta(B)|.
inline double check_exchangeability(const StationaryDistribution& theta, bool all_permutations = false) {
  double worst = 0.0;
  for_each_relabeling(theta.n(), all_permutations, [&](const PartitionPermutation& sigma) {
    for (std::size_t i = 0; i < theta.size(); ++i)
      worst = std::max(worst, std::abs(theta(apply_permutation(theta.space[i], sigma)) - theta.weights[i]));
  });
  return worst;
}

// max_B |theta(B) - rho_n(B; alpha, k)| against the Dirichlet-multinomial law.
inline double check_eppf_match(const StationaryDistribution& theta, double alpha) {
  double worst = 0.0;
  for (std::size_t i = 0; i < theta.size(); ++i)
    worst = std::max(worst, std::abs(theta.weights[i] - eppf_dirichlet_multinomial(theta.space[i], alpha, theta.k())));
  return worst;
}

}  // namespace pbm
