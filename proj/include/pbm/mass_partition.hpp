#pragma once

// Points of the ranked k-simplex and mixing measures nu on it.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "pbm/errors.hpp"
#include "pbm/rng.hpp"

namespace pbm {

inline constexpr double kSimplexTolerance = 1e-12;
inline constexpr double kArithmeticTolerance = 1e-9;

// s_1 >= s_2 >= ... >= s_k >= 0 with sum 1.
class MassPartition {
 public:
  MassPartition() = default;

  // Validates an already ranked vector.
  static MassPartition ranked(std::vector<double> masses, double tolerance = kSimplexTolerance) {
    if (masses.empty()) throw domain_error("mass partition: no coordinates");
    double total = 0.0;
    for (std::size_t i = 0; i < masses.size(); ++i) {
      if (!(masses[i] >= 0.0)) throw domain_error("mass partition: negative or NaN mass");
      if (i > 0 && masses[i] > masses[i - 1]) throw domain_error("mass partition: masses not ranked");
      total += masses[i];
    }
    if (std::abs(total - 1.0) > tolerance)
      throw domain_error("mass partition: masses sum to " + std::to_string(total) + ", not 1");
    MassPartition s;
    s.masses_ = std::move(masses);
    return s;
  }

  int size() const { return static_cast<int>(masses_.size()); }
  double operator[](int i) const { return masses_[i]; }
  const std::vector<double>& masses() const { return masses_; }

  // Number of strictly positive coordinates.
  int support() const {
    return static_cast<int>(std::count_if(masses_.begin(), masses_.end(), [](double x) { return x > 0.0; }));
  }

  // Zero-padded (or zero-trimmed) to exactly k coordinates.
  MassPartition padded(int k) const {
    std::vector<double> m = masses_;
    if (k < size()) {
      for (int i = k; i < size(); ++i)
        if (m[i] > 0.0) throw dimension_error("mass partition: positive mass beyond coordinate k");
    }
    m.resize(static_cast<std::size_t>(k), 0.0);
    MassPartition s;
    s.masses_ = std::move(m);
    return s;
  }

  friend bool operator==(const MassPartition&, const MassPartition&) = default;

 private:
  std::vector<double> masses_;
};

// The decreasing rearrangement; accepts sums within 1e-9 of 1.
inline MassPartition rank(std::vector<double> masses) {
  std::sort(masses.begin(), masses.end(), std::greater<>());
  return MassPartition::ranked(std::move(masses), kArithmeticTolerance);
}

struct MixtureAtom {
  double weight;
  MassPartition point;
};

struct DiscreteMixture {
  std::vector<MixtureAtom> atoms;
};

// PD(-alpha/k, alpha) on the ranked k-simplex: ranked symmetric
// Dirichlet(alpha/k, ..., alpha/k) with k coordinates.
struct PitmanDirichlet {
  double alpha;
  int k;
};

class NuMeasure {
 public:
  static NuMeasure discrete(std::vector<MixtureAtom> atoms) {
    if (atoms.empty()) throw domain_error("discrete nu: no atoms");
    double total = 0.0;
    for (const auto& a : atoms) {
      if (!(a.weight > 0.0)) throw domain_error("discrete nu: weights must be positive");
      total += a.weight;
    }
    if (std::abs(total - 1.0) > kSimplexTolerance) throw domain_error("discrete nu: weights do not sum to 1");
    NuMeasure nu;
    nu.value_ = DiscreteMixture{std::move(atoms)};
    return nu;
  }

  static NuMeasure point_mass(MassPartition s) { return discrete({MixtureAtom{1.0, std::move(s)}}); }

  static NuMeasure pitman_dirichlet(double alpha, int k) {
    if (!(alpha > 0.0)) throw domain_error("PD nu: alpha must be positive");
    if (k < 1) throw domain_error("PD nu: k must be positive");
    NuMeasure nu;
    nu.value_ = PitmanDirichlet{alpha, k};
    return nu;
  }

  bool is_discrete() const { return std::holds_alternative<DiscreteMixture>(value_); }
  const DiscreteMixture& as_discrete() const { return std::get<DiscreteMixture>(value_); }
  const PitmanDirichlet& as_pitman_dirichlet() const { return std::get<PitmanDirichlet>(value_); }

  // Smallest k such that nu lives on the ranked k-simplex.
  int dimension() const {
    if (!is_discrete()) return as_pitman_dirichlet().k;
    int d = 1;
    for (const auto& a : as_discrete().atoms) d = std::max(d, a.point.support());
    return d;
  }

  // True iff all mass sits on (1, 0, ..., 0).
  bool degenerate() const {
    if (!is_discrete()) return false;
    for (const auto& a : as_discrete().atoms)
      if (a.point.support() > 1) return false;
    return true;
  }

 private:
  NuMeasure() = default;
  std::variant<DiscreteMixture, PitmanDirichlet> value_;
};

// Unranked symmetric Dirichlet(shape, ..., shape) draw of length k.
inline std::vector<double> symmetric_dirichlet(double shape, int k, RngStream& rng) {
  std::vector<double> g(static_cast<std::size_t>(k));
  double total = 0.0;
  do {
    total = 0.0;
    for (auto& x : g) {
      x = rng.gamma(shape);
      total += x;
    }
  } while (!(total > 0.0));
  for (auto& x : g) x /= total;
  return g;
}

inline MassPartition sample_nu(const NuMeasure& nu, RngStream& rng) {
  if (nu.is_discrete()) {
    const auto& atoms = nu.as_discrete().atoms;
    std::vector<double> w;
    w.reserve(atoms.size());
    for (const auto& a : atoms) w.push_back(a.weight);
    return atoms[rng.categorical(w)].point;
  }
  const auto& pd = nu.as_pitman_dirichlet();
  auto g = symmetric_dirichlet(pd.alpha / pd.k, pd.k, rng);
  std::sort(g.begin(), g.end(), std::greater<>());
  return MassPartition::ranked(std::move(g), kArithmeticTolerance);
}

}  // namespace pbm
