#pragma once

// Seeded random streams. A (seed, stream id) pair fully determines the draw
// sequence, so replicate r of an ensemble can use RngStream(seed, r) and run
// on any thread.

#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <vector>

namespace pbm {

inline constexpr std::uint64_t kDefaultSeed = 20100914;

class RngStream {
 public:
  explicit RngStream(std::uint64_t seed = kDefaultSeed, std::uint64_t stream = 0)
      : seed_(seed), stream_(stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                      0x9e3779b9u};
    engine_.seed(seq);
  }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_; }

  // Independent stream sharing this stream's seed.
  RngStream split(std::uint64_t stream) const { return RngStream(seed_, stream); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double exponential(double rate) { return -std::log1p(-uniform()) / rate; }

  double gamma(double shape) {
    std::gamma_distribution<double> dist(shape, 1.0);
    return dist(engine_);
  }

  // Uniform integer on [0, bound).
  int below(int bound) {
    std::uniform_int_distribution<int> dist(0, bound - 1);
    return dist(engine_);
  }

  // Index i with probability weights[i] / sum(weights).
  std::size_t categorical(std::span<const double> weights) {
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    double u = uniform() * total;
    std::size_t last_positive = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      if (weights[i] <= 0.0) continue;
      last_positive = i;
      if (u < weights[i]) return i;
      u -= weights[i];
    }
    return last_positive;
  }

  // Uniform permutation of {0, ..., k-1} by Fisher-Yates.
  std::vector<int> permutation(int k) {
    std::vector<int> p(static_cast<std::size_t>(k));
    std::iota(p.begin(), p.end(), 0);
    for (int i = k - 1; i > 0; --i) std::swap(p[i], p[below(i + 1)]);
    return p;
  }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
};

}  // namespace pbm
