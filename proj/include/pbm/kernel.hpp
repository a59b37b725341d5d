#pragma once

// The discrete-time rho_nu-Markov transition on P_[n]^(k): the B cap C^sigma
// matrix construction, the exact transition probability, the alpha-permanent
// and the closed form of the (alpha, k) family.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "pbm/errors.hpp"
#include "pbm/mass_partition.hpp"
#include "pbm/paintbox.hpp"
#include "pbm/partition.hpp"
#include "pbm/rng.hpp"
#include "pbm/state_space.hpp"

namespace pbm {

// A rho_nu-Markov chain on P^(k): the mixing measure, the number of columns k,
// and whether transitions use the (alpha, k) closed form.
class ChainModel {
 public:
  static ChainModel paintbox(NuMeasure nu, int k) {
    if (k < 1) throw domain_error("chain model: k must be positive");
    if (nu.dimension() > k) throw dimension_error("chain model: nu is not supported on the ranked k-simplex");
    return ChainModel(std::move(nu), k, false);
  }

  // nu = PD(-alpha/k, alpha), evaluated through the alpha-permanent formula.
  static ChainModel alpha_k(double alpha, int k) {
    return ChainModel(NuMeasure::pitman_dirichlet(alpha, k), k, true);
  }

  const NuMeasure& nu() const { return nu_; }
  int k() const { return k_; }
  bool closed_form() const { return closed_form_; }
  double alpha() const { return nu_.as_pitman_dirichlet().alpha; }

 private:
  ChainModel(NuMeasure nu, int k, bool closed_form) : nu_(std::move(nu)), k_(k), closed_form_(closed_form) {}

  NuMeasure nu_;
  int k_;
  bool closed_form_;
};

// sigma_1, ..., sigma_r: uniform permutations of {0, ..., k-1}, one per row.
// Column j of row i receives block sigmas[i][j] of C_i.
struct BlockPermutationDraw {
  std::vector<std::vector<int>> sigmas;

  static BlockPermutationDraw sample(int rows, int k, RngStream& rng) {
    BlockPermutationDraw d;
    d.sigmas.reserve(static_cast<std::size_t>(rows));
    for (int i = 0; i < rows; ++i) d.sigmas.push_back(rng.permutation(k));
    return d;
  }
};

struct ConstructionResult {
  SetPartition next;   // nonempty column totals
  SetPartition cells;  // nonempty entries of B cap C^sigma
};

// Applies the matrix construction. row_labels[i][e-1] is the 0-based block
// (in order of appearance) of C_i containing e; only entries for e in B_i
// are read.
inline ConstructionResult matrix_construction(const SetPartition& b, std::span<const std::vector<int>> row_labels,
                                              const BlockPermutationDraw& draw, int k) {
  const int rows = b.block_count();
  if (rows > k) throw state_error("matrix construction: state has more than k blocks");
  if (static_cast<int>(row_labels.size()) < rows || static_cast<int>(draw.sigmas.size()) < rows)
    throw dimension_error("matrix construction: fewer rows than blocks");
  std::vector<int> column(static_cast<std::size_t>(b.size()));
  std::vector<int> cell(static_cast<std::size_t>(b.size()));
  std::vector<int> inverse(static_cast<std::size_t>(k));
  for (int i = 0; i < rows; ++i) {
    const auto& sigma = draw.sigmas[i];
    for (int j = 0; j < k; ++j) inverse[sigma[j]] = j;
    for (int e : b.block(i)) {
      const int c = row_labels[i][e - 1];
      if (c < 0 || c >= k) throw state_error("matrix construction: paintbox block index outside [k]");
      const int j = inverse[c];
      column[e - 1] = j;
      cell[e - 1] = i * k + j;
    }
  }
  return {SetPartition::from_labels(column), SetPartition::from_labels(cell)};
}

// One step of the chain, also returning the cells of B cap C^sigma.
// Draws one paintbox per block of B, restricted to that block.
inline ConstructionResult step_sample_detailed(const SetPartition& b, const NuMeasure& nu, int k, RngStream& rng) {
  if (b.block_count() > k) throw state_error("step_sample: state has more than k blocks");
  const int rows = b.block_count();
  std::vector<std::vector<int>> row_labels(static_cast<std::size_t>(rows));
  for (int i = 0; i < rows; ++i) {
    const auto s = sample_nu(nu, rng);
    auto& labels = row_labels[i];
    labels.assign(static_cast<std::size_t>(b.size()), -1);
    // Order-of-appearance index of each color within the block.
    std::vector<int> seen(static_cast<std::size_t>(s.size()), -1);
    int next_index = 0;
    for (int e : b.block(i)) {
      const int color = static_cast<int>(rng.categorical(s.masses()));
      if (seen[color] < 0) seen[color] = next_index++;
      labels[e - 1] = seen[color];
    }
  }
  const auto draw = BlockPermutationDraw::sample(rows, k, rng);
  return matrix_construction(b, row_labels, draw, k);
}

inline SetPartition step_sample(const SetPartition& b, const NuMeasure& nu, int k, RngStream& rng) {
  return step_sample_detailed(b, nu, k, rng).next;
}

namespace detail {

inline void check_transition_args(const SetPartition& b, const SetPartition& b2, int k) {
  if (b.size() != b2.size()) throw dimension_error("transition: partitions of different ground sets");
  if (b.block_count() > k || b2.block_count() > k) throw state_error("transition: state has more than k blocks");
}

// Ascending block sizes of b2 restricted to the elements of `block`.
inline std::vector<int> restricted_sizes(const SetPartition& b2, const Block& block) {
  std::vector<int> counts(static_cast<std::size_t>(b2.block_count()), 0);
  for (int e : block) ++counts[b2.block_of(e)];
  std::vector<int> sizes;
  for (int c : counts)
    if (c > 0) sizes.push_back(c);
  std::sort(sizes.begin(), sizes.end());
  return sizes;
}

inline double product_sorted(std::vector<double> factors) {
  std::sort(factors.begin(), factors.end());
  double p = 1.0;
  for (double f : factors) p *= f;
  return p;
}

}  // namespace detail

// p_n(B, B'; nu) = (k!/(k-#B')!) prod_{b in B} ((k-#B'_{|b})!/k!) rho_nu(B'_{|b}).
inline double transition_exact(const SetPartition& b, const SetPartition& b2, RhoCache& rho, int k) {
  detail::check_transition_args(b, b2, k);
  std::vector<double> factors;
  factors.reserve(static_cast<std::size_t>(b.block_count()) + 1);
  factors.push_back(std::exp(detail::log_falling_factorial(k, b2.block_count())));
  for (const auto& block : b.blocks()) {
    const auto sizes = detail::restricted_sizes(b2, block);
    const double r = rho(sizes);
    if (r == 0.0) return 0.0;
    factors.push_back(r / std::exp(detail::log_falling_factorial(k, static_cast<int>(sizes.size()))));
  }
  return detail::product_sorted(std::move(factors));
}

inline double transition_exact(const SetPartition& b, const SetPartition& b2, const NuMeasure& nu, int k) {
  RhoCache rho(nu);
  return transition_exact(b, b2, rho, k);
}

// per_alpha M = sum over permutations of alpha^{#cycles} prod M_{i, sigma(i)}.
inline double alpha_permanent(const Eigen::MatrixXd& m, double alpha) {
  if (m.rows() != m.cols()) throw dimension_error("alpha_permanent: matrix is not square");
  const int n = static_cast<int>(m.rows());
  if (n > 10) throw size_error("alpha_permanent: n > 10");
  if (n == 0) return 1.0;
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<char> visited(static_cast<std::size_t>(n));
  std::vector<double> alpha_pow(static_cast<std::size_t>(n) + 1, 1.0);
  for (int c = 1; c <= n; ++c) alpha_pow[c] = alpha_pow[c - 1] * alpha;
  double total = 0.0;
  do {
    double prod = 1.0;
    for (int i = 0; i < n && prod != 0.0; ++i) prod *= m(i, perm[i]);
    if (prod == 0.0) continue;
    std::fill(visited.begin(), visited.end(), 0);
    int cycles = 0;
    for (int i = 0; i < n; ++i) {
      if (visited[i]) continue;
      ++cycles;
      for (int j = i; !visited[j]; j = perm[j]) visited[j] = 1;
    }
    total += alpha_pow[cycles] * prod;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return total;
}

// The n x n Boolean matrix B(i, j) = 1 iff i ~ j.
inline Eigen::MatrixXd partition_matrix(const SetPartition& b) {
  const int n = b.size();
  Eigen::MatrixXd m(n, n);
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= n; ++j) m(i - 1, j - 1) = b.same_block(i, j) ? 1.0 : 0.0;
  return m;
}

// per_alpha B = prod_b alpha^{up #b}.
inline double alpha_permanent_partition(const SetPartition& b, double alpha) {
  if (!(alpha > 0.0)) throw domain_error("alpha_permanent_partition: alpha must be positive");
  double log_p = 0.0;
  for (int sz : b.block_sizes()) log_p += detail::log_rising_factorial(alpha, sz);
  return std::exp(log_p);
}

// p_n(B, B'; alpha, k) = (k!/(k-#B')!) per_{alpha/k}(B meet B') / per_alpha(B).
inline double transition_alpha_k(const SetPartition& b, const SetPartition& b2, double alpha, int k) {
  detail::check_transition_args(b, b2, k);
  if (!(alpha > 0.0)) throw domain_error("transition_alpha_k: alpha must be positive");
  const auto cells = meet(b, b2);
  double log_p = detail::log_falling_factorial(k, b2.block_count());
  for (int sz : cells.block_sizes()) log_p += detail::log_rising_factorial(alpha / k, sz);
  for (int sz : b.block_sizes()) log_p -= detail::log_rising_factorial(alpha, sz);
  return std::exp(log_p);
}

inline double transition(const SetPartition& b, const SetPartition& b2, const ChainModel& model) {
  if (model.closed_form()) return transition_alpha_k(b, b2, model.alpha(), model.k());
  return transition_exact(b, b2, model.nu(), model.k());
}

// Dense p_n(B, B') over P_[n]^(k).
struct TransitionKernel {
  StateSpace space;
  Eigen::MatrixXd probs;
  // Known when built from a model; empty for kernels read from disk.
  std::optional<bool> nondegenerate;

  int n() const { return space.n(); }
  int k() const { return space.k(); }
  std::size_t size() const { return space.size(); }
  const std::vector<SetPartition>& states() const { return space.states(); }
  std::size_t index_of(const SetPartition& b) const { return space.index_of(b); }
};

inline TransitionKernel build_kernel(int n, const ChainModel& model) {
  TransitionKernel kernel{StateSpace(n, model.k()), {}, !model.nu().degenerate()};
  const std::size_t size = kernel.size();
  kernel.probs.resize(static_cast<Eigen::Index>(size), static_cast<Eigen::Index>(size));
  RhoCache rho(model.nu());
  for (std::size_t i = 0; i < size; ++i) {
    for (std::size_t j = 0; j < size; ++j) {
      const auto& from = kernel.space[i];
      const auto& to = kernel.space[j];
      kernel.probs(i, j) = model.closed_form() ? transition_alpha_k(from, to, model.alpha(), model.k())
                                               : transition_exact(from, to, rho, model.k());
    }
  }
  return kernel;
}

inline TransitionKernel build_kernel(int n, int k, const NuMeasure& nu) {
  return build_kernel(n, ChainModel::paintbox(nu, k));
}

inline TransitionKernel build_kernel_alpha_k(int n, int k, double alpha) {
  return build_kernel(n, ChainModel::alpha_k(alpha, k));
}

inline double max_row_sum_defect(const Eigen::MatrixXd& m, double target) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) worst = std::max(worst, std::abs(m.row(i).sum() - target));
  return worst;
}

inline double max_row_sum_defect(const TransitionKernel& kernel) { return max_row_sum_defect(kernel.probs, 1.0); }

// max |M_n(B, B') - sum_{B'' in D^{-1}(B')} M_{n+1}(B*, B'')| over B, B' and
// every B* in D^{-1}(B), all within P^(k). Applies to kernels and Q-matrices.
inline double consistency_defect(const StateSpace& lower, const Eigen::MatrixXd& lower_m, const StateSpace& upper,
                                 const Eigen::MatrixXd& upper_m) {
  if (upper.n() != lower.n() + 1 || upper.k() != lower.k())
    throw dimension_error("consistency: matrices must be over [n] and [n+1] with equal k");
  const int k = lower.k();
  std::vector<std::vector<std::size_t>> ext(lower.size());
  for (std::size_t i = 0; i < lower.size(); ++i)
    for (const auto& e : extensions(lower[i], k)) ext[i].push_back(upper.index_of(e));
  double worst = 0.0;
  for (std::size_t i = 0; i < lower.size(); ++i) {
    for (std::size_t star : ext[i]) {
      for (std::size_t j = 0; j < lower.size(); ++j) {
        double mass = 0.0;
        for (std::size_t jj : ext[j]) mass += upper_m(star, jj);
        worst = std::max(worst, std::abs(lower_m(i, j) - mass));
      }
    }
  }
  return worst;
}

inline double consistency_defect(const TransitionKernel& lower, const TransitionKernel& upper) {
  return consistency_defect(lower.space, lower.probs, upper.space, upper.probs);
}

inline double check_consistency(int n, const ChainModel& model) {
  return consistency_defect(build_kernel(n, model), build_kernel(n + 1, model));
}

inline double check_consistency(int n, int k, const NuMeasure& nu) {
  return check_consistency(n, ChainModel::paintbox(nu, k));
}

// Invokes f(sigma) for every permutation of [n] (all_permutations) or for the
// adjacent transpositions, which generate S_n.
template <typename F>
void for_each_relabeling(int n, bool all_permutations, F&& f) {
  if (!all_permutations) {
    for (int i = 1; i < n; ++i) f(PartitionPermutation::transposition(n, i, i + 1));
    return;
  }
  auto mapping = PartitionPermutation::identity(n).mapping();
  do {
    f(PartitionPermutation(mapping));
  } while (std::next_permutation(mapping.begin(), mapping.end()));
}

// max |p(sigma B, sigma B') - p(B, B')|.
inline double check_kernel_exchangeability(const TransitionKernel& kernel, bool all_permutations = false) {
  double worst = 0.0;
  std::vector<std::size_t> image(kernel.size());
  for_each_relabeling(kernel.n(), all_permutations, [&](const PartitionPermutation& sigma) {
    for (std::size_t i = 0; i < kernel.size(); ++i)
      image[i] = kernel.index_of(apply_permutation(kernel.space[i], sigma));
    for (std::size_t i = 0; i < kernel.size(); ++i)
      for (std::size_t j = 0; j < kernel.size(); ++j)
        worst = std::max(worst, std::abs(kernel.probs(image[i], image[j]) - kernel.probs(i, j)));
  });
  return worst;
}

}  // namespace pbm
