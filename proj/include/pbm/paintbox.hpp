#pragma once

// The paintbox map: sampling rho_s / rho_nu partitions and evaluating their
// probabilities exactly.

#include <algorithm>
#include <cmath>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "pbm/errors.hpp"
#include "pbm/mass_partition.hpp"
#include "pbm/partition.hpp"
#include "pbm/rng.hpp"

namespace pbm {

// X_1, ..., X_n with colors in 1..k.
class ColorSequence {
 public:
  ColorSequence(int k, std::vector<int> colors) : k_(k), colors_(std::move(colors)) {
    for (int c : colors_)
      if (c < 1 || c > k_) throw domain_error("color sequence: color outside 1..k");
  }

  int size() const { return static_cast<int>(colors_.size()); }
  int k() const { return k_; }
  int operator[](int i) const { return colors_[i]; }
  const std::vector<int>& colors() const { return colors_; }

  // i ~ j iff X_i = X_j.
  SetPartition partition() const { return SetPartition::from_labels(colors_); }

 private:
  int k_;
  std::vector<int> colors_;
};

inline std::pair<SetPartition, ColorSequence> paintbox_sample(const MassPartition& s, int n, RngStream& rng) {
  if (n < 1) throw domain_error("paintbox_sample: n must be positive");
  std::vector<int> colors(static_cast<std::size_t>(n));
  for (auto& c : colors) c = static_cast<int>(rng.categorical(s.masses())) + 1;
  ColorSequence seq(s.size(), std::move(colors));
  return {seq.partition(), std::move(seq)};
}

inline SetPartition paintbox_sample_nu(const NuMeasure& nu, int n, RngStream& rng) {
  const auto s = sample_nu(nu, rng);
  return paintbox_sample(s, n, rng).first;
}

namespace detail {

inline double log_falling_factorial(int k, int j) {
  return std::lgamma(static_cast<double>(k) + 1.0) - std::lgamma(static_cast<double>(k - j) + 1.0);
}

// log(a^{up m}) = log Gamma(a + m) - log Gamma(a).
inline double log_rising_factorial(double a, int m) { return std::lgamma(a + m) - std::lgamma(a); }

// Sum over injective maps c from blocks into colors of prod s_{c(b)}^{#b}.
inline double injective_paintbox_sum(std::span<const int> sizes, std::span<const double> s) {
  const int k = static_cast<int>(s.size());
  const int m = static_cast<int>(sizes.size());
  if (m > k) return 0.0;
  std::vector<char> used(static_cast<std::size_t>(k), 0);
  auto recurse = [&](auto&& self, int i) -> double {
    if (i == m) return 1.0;
    double acc = 0.0;
    for (int c = 0; c < k; ++c) {
      if (used[c] || s[c] == 0.0) continue;
      used[c] = 1;
      acc += std::pow(s[c], sizes[i]) * self(self, i + 1);
      used[c] = 0;
    }
    return acc;
  };
  return recurse(recurse, 0);
}

}  // namespace detail

// rho_s(B) from the ascending block-size profile of B.
inline double rho_mass_sizes(std::span<const int> sizes, const MassPartition& s) {
  return detail::injective_paintbox_sum(sizes, s.masses());
}

inline double rho_mass(const SetPartition& b, const MassPartition& s) {
  const auto sizes = b.block_sizes();
  return rho_mass_sizes(sizes, s);
}

inline double rho_discrete_sizes(std::span<const int> sizes, const DiscreteMixture& nu) {
  double total = 0.0;
  for (const auto& atom : nu.atoms) total += atom.weight * rho_mass_sizes(sizes, atom.point);
  return total;
}

// rho_nu(B) for a finite mixture of paintboxes; zero when #B exceeds the support.
inline double rho_discrete(const SetPartition& b, const DiscreteMixture& nu) {
  const auto sizes = b.block_sizes();
  return rho_discrete_sizes(sizes, nu);
}

// (k!/(k-#B)!) per_{alpha/k}(B) / alpha^{up n}: rho_nu for nu = PD(-alpha/k, alpha).
inline double eppf_alpha_k_sizes(std::span<const int> sizes, double alpha, int k) {
  if (!(alpha > 0.0)) throw domain_error("eppf_alpha_k: alpha must be positive");
  const int m = static_cast<int>(sizes.size());
  if (m > k) return 0.0;
  int n = 0;
  double log_p = detail::log_falling_factorial(k, m);
  const double a = alpha / k;
  for (int sz : sizes) {
    log_p += detail::log_rising_factorial(a, sz);
    n += sz;
  }
  log_p -= detail::log_rising_factorial(alpha, n);
  return std::exp(log_p);
}

inline double eppf_alpha_k(const SetPartition& b, double alpha, int k) {
  const auto sizes = b.block_sizes();
  return eppf_alpha_k_sizes(sizes, alpha, k);
}

// Dirichlet-multinomial partition law with parameter (alpha, k):
// (k!/(k-#B)!) prod_b Gamma(alpha+#b)/Gamma(alpha) / (Gamma(k alpha+n)/Gamma(k alpha)).
inline double eppf_dirichlet_multinomial_sizes(std::span<const int> sizes, double alpha, int k) {
  if (!(alpha > 0.0)) throw domain_error("eppf_dirichlet_multinomial: alpha must be positive");
  const int m = static_cast<int>(sizes.size());
  if (m > k) return 0.0;
  int n = 0;
  double log_p = detail::log_falling_factorial(k, m);
  for (int sz : sizes) {
    log_p += detail::log_rising_factorial(alpha, sz);
    n += sz;
  }
  log_p -= detail::log_rising_factorial(k * alpha, n);
  return std::exp(log_p);
}

inline double eppf_dirichlet_multinomial(const SetPartition& b, double alpha, int k) {
  const auto sizes = b.block_sizes();
  return eppf_dirichlet_multinomial_sizes(sizes, alpha, k);
}

inline double rho_nu_sizes(std::span<const int> sizes, const NuMeasure& nu) {
  if (nu.is_discrete()) return rho_discrete_sizes(sizes, nu.as_discrete());
  const auto& pd = nu.as_pitman_dirichlet();
  return eppf_alpha_k_sizes(sizes, pd.alpha, pd.k);
}

inline double rho_nu(const SetPartition& b, const NuMeasure& nu) {
  const auto sizes = b.block_sizes();
  return rho_nu_sizes(sizes, nu);
}

// Memoizes rho_nu by block-size profile; rho_nu is exchangeable, so the
// profile is a sufficient key. Not thread-safe.
class RhoCache {
 public:
  explicit RhoCache(NuMeasure nu) : nu_(std::move(nu)) {}

  const NuMeasure& nu() const { return nu_; }

  // sizes must be sorted ascending.
  double operator()(const std::vector<int>& sizes) {
    auto it = cache_.find(sizes);
    if (it != cache_.end()) return it->second;
    const double p = rho_nu_sizes(sizes, nu_);
    cache_.emplace(sizes, p);
    return p;
  }

  double operator()(const SetPartition& b) { return (*this)(b.block_sizes()); }

 private:
  NuMeasure nu_;
  std::map<std::vector<int>, double> cache_;
};

}  // namespace pbm
