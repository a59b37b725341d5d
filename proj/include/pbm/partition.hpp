#pragma once

// Set partitions of [n] = {1, ..., n}.
//
// A SetPartition is always held in canonical form: every block is strictly
// increasing and blocks are listed in increasing order of their least
// element. Elements are 1-indexed everywhere in the public interface.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "pbm/errors.hpp"

namespace pbm {

using Block = std::vector<int>;

class SetPartition {
 public:
  SetPartition() = default;

  // Builds from arbitrary blocks; validates coverage of [n] and canonicalizes.
  static SetPartition from_blocks(std::vector<Block> blocks) {
    std::size_t total = 0;
    for (const auto& b : blocks) {
      if (b.empty()) throw domain_error("set partition: empty block");
      total += b.size();
    }
    const int n = static_cast<int>(total);
    std::vector<int> labels(total, -1);
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      for (int e : blocks[i]) {
        if (e < 1 || e > n) throw domain_error("set partition: element out of range");
        if (labels[e - 1] != -1) throw domain_error("set partition: blocks overlap");
        labels[e - 1] = static_cast<int>(i);
      }
    }
    return from_labels(labels);
  }

  // labels[e - 1] is any integer tag for element e; equal tags share a block.
  // Negative tags are not allowed.
  static SetPartition from_labels(std::span<const int> labels) {
    SetPartition p;
    p.n_ = static_cast<int>(labels.size());
    p.labels_.resize(labels.size());
    std::vector<int> remap;
    for (std::size_t e = 0; e < labels.size(); ++e) {
      const int tag = labels[e];
      if (tag < 0) throw domain_error("set partition: negative label");
      if (static_cast<std::size_t>(tag) >= remap.size()) remap.resize(tag + 1, -1);
      if (remap[tag] == -1) {
        remap[tag] = static_cast<int>(p.blocks_.size());
        p.blocks_.emplace_back();
      }
      p.labels_[e] = remap[tag];
      p.blocks_[remap[tag]].push_back(static_cast<int>(e) + 1);
    }
    return p;
  }

  static SetPartition one_block(int n) {
    return from_labels(std::vector<int>(static_cast<std::size_t>(n), 0));
  }

  static SetPartition singletons(int n) {
    std::vector<int> labels(static_cast<std::size_t>(n));
    std::iota(labels.begin(), labels.end(), 0);
    return from_labels(labels);
  }

  int size() const { return n_; }
  int block_count() const { return static_cast<int>(blocks_.size()); }
  const std::vector<Block>& blocks() const { return blocks_; }
  const Block& block(int i) const { return blocks_[i]; }

  // Restricted growth string: 0-based block index of each element, in order.
  const std::vector<int>& labels() const { return labels_; }
  int block_of(int element) const { return labels_[element - 1]; }

  bool same_block(int i, int j) const { return labels_[i - 1] == labels_[j - 1]; }

  // Block sizes sorted ascending; the only statistic an exchangeable law sees.
  std::vector<int> block_sizes() const {
    std::vector<int> sizes;
    sizes.reserve(blocks_.size());
    for (const auto& b : blocks_) sizes.push_back(static_cast<int>(b.size()));
    std::sort(sizes.begin(), sizes.end());
    return sizes;
  }

  std::string to_string() const {
    std::string out;
    for (const auto& b : blocks_) {
      out += '{';
      for (std::size_t i = 0; i < b.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(b[i]);
      }
      out += '}';
    }
    return out;
  }

  friend bool operator==(const SetPartition& a, const SetPartition& b) {
    return a.n_ == b.n_ && a.labels_ == b.labels_;
  }
  friend bool operator<(const SetPartition& a, const SetPartition& b) {
    return std::tie(a.n_, a.labels_) < std::tie(b.n_, b.labels_);
  }

 private:
  int n_ = 0;
  std::vector<Block> blocks_;
  std::vector<int> labels_;
};

// A bijection of [n]; image(i) is sigma(i).
class PartitionPermutation {
 public:
  explicit PartitionPermutation(std::vector<int> mapping) : mapping_(std::move(mapping)) {
    const int n = size();
    std::vector<char> seen(mapping_.size(), 0);
    for (int v : mapping_) {
      if (v < 1 || v > n || seen[v - 1]) throw domain_error("permutation: mapping is not a bijection");
      seen[v - 1] = 1;
    }
  }

  static PartitionPermutation identity(int n) {
    std::vector<int> m(static_cast<std::size_t>(n));
    std::iota(m.begin(), m.end(), 1);
    return PartitionPermutation(std::move(m));
  }

  static PartitionPermutation transposition(int n, int i, int j) {
    auto id = identity(n).mapping_;
    std::swap(id[i - 1], id[j - 1]);
    return PartitionPermutation(std::move(id));
  }

  int size() const { return static_cast<int>(mapping_.size()); }
  int image(int i) const { return mapping_[i - 1]; }
  const std::vector<int>& mapping() const { return mapping_; }

  PartitionPermutation inverse() const {
    std::vector<int> inv(mapping_.size());
    for (std::size_t i = 0; i < mapping_.size(); ++i) inv[mapping_[i] - 1] = static_cast<int>(i) + 1;
    return PartitionPermutation(std::move(inv));
  }

 private:
  std::vector<int> mapping_;
};

// Stirling number of the second kind S(n, j), exact in 64-bit for n <= 25.
inline std::uint64_t stirling2(int n, int j) {
  if (n < 0 || j < 0) return 0;
  std::vector<std::uint64_t> row(static_cast<std::size_t>(j) + 1, 0);
  row[0] = 1;
  for (int m = 1; m <= n; ++m) {
    for (int i = std::min(m, j); i >= 1; --i) row[i] = static_cast<std::uint64_t>(i) * row[i] + row[i - 1];
    row[0] = 0;
  }
  return row[j];
}

// |P_[n]^(k)|, the number of partitions of [n] with at most k blocks.
inline std::uint64_t count_partitions(int n, int k) {
  std::uint64_t total = 0;
  for (int j = 1; j <= std::min(n, k); ++j) total += stirling2(n, j);
  return total;
}

// Every partition of [n] with at most k blocks, in lexicographic order of
// restricted growth strings.
inline std::vector<SetPartition> enumerate(int n, int k) {
  if (n < 1 || k < 1) throw domain_error("enumerate: n and k must be positive");
  std::vector<SetPartition> out;
  out.reserve(count_partitions(n, k));
  std::vector<int> rgs(static_cast<std::size_t>(n), 0);
  std::vector<int> prefix_max(static_cast<std::size_t>(n), 0);
  // Depth-first over positions 1..n-1; position 0 is always label 0.
  auto recurse = [&](auto&& self, int pos) -> void {
    if (pos == n) {
      out.push_back(SetPartition::from_labels(rgs));
      return;
    }
    const int m = prefix_max[pos - 1];
    const int top = std::min(m + 1, k - 1);
    for (int v = 0; v <= top; ++v) {
      rgs[pos] = v;
      prefix_max[pos] = std::max(m, v);
      self(self, pos + 1);
    }
  };
  if (n == 1) {
    out.push_back(SetPartition::one_block(1));
  } else {
    recurse(recurse, 1);
  }
  return out;
}

// D_{m,n}: restriction of a partition of [n] to [m].
inline SetPartition restrict(const SetPartition& b, int m) {
  if (m < 1 || m > b.size()) throw range_error("restrict: m must satisfy 1 <= m <= n");
  return SetPartition::from_labels(std::span<const int>(b.labels()).first(static_cast<std::size_t>(m)));
}

// Restriction to an arbitrary subset, relabelled onto [#subset] in increasing
// order of the subset's elements.
inline SetPartition restrict_to(const SetPartition& b, std::span<const int> subset) {
  std::vector<int> labels;
  labels.reserve(subset.size());
  for (int e : subset) labels.push_back(b.block_of(e));
  return SetPartition::from_labels(labels);
}

// D^{-1}_{n,n+1}(B) within P_[n+1]^(k): n+1 joins each block in turn, then
// the singleton extension when B has fewer than k blocks.
inline std::vector<SetPartition> extensions(const SetPartition& b, int k) {
  if (b.block_count() > k) throw state_error("extensions: partition has more than k blocks");
  std::vector<SetPartition> out;
  std::vector<int> labels = b.labels();
  labels.push_back(0);
  for (int i = 0; i < b.block_count(); ++i) {
    labels.back() = i;
    out.push_back(SetPartition::from_labels(labels));
  }
  if (b.block_count() < k) {
    labels.back() = b.block_count();
    out.push_back(SetPartition::from_labels(labels));
  }
  return out;
}

// Greatest lower bound: blocks are the nonempty pairwise intersections.
inline SetPartition meet(const SetPartition& a, const SetPartition& b) {
  if (a.size() != b.size()) throw dimension_error("meet: partitions of different ground sets");
  const int width = b.block_count();
  std::vector<int> labels(static_cast<std::size_t>(a.size()));
  for (int e = 0; e < a.size(); ++e) labels[e] = a.labels()[e] * width + b.labels()[e];
  return SetPartition::from_labels(labels);
}

// sigma(B): i ~ j in the image iff sigma^{-1}(i) ~ sigma^{-1}(j) in B.
inline SetPartition apply_permutation(const SetPartition& b, const PartitionPermutation& sigma) {
  if (b.size() != sigma.size()) throw dimension_error("apply_permutation: size mismatch");
  std::vector<int> labels(static_cast<std::size_t>(b.size()));
  for (int i = 1; i <= b.size(); ++i) labels[sigma.image(i) - 1] = b.block_of(i);
  return SetPartition::from_labels(labels);
}

// Largest m <= n such that the restrictions of a and b to [m] coincide.
inline int prefix_agreement(const SetPartition& a, const SetPartition& b) {
  if (a.size() != b.size()) throw dimension_error("prefix_distance: size mismatch");
  // Restrictions to [m] agree iff the restricted growth strings share a prefix of length m.
  int m = 0;
  while (m < a.size() && a.labels()[m] == b.labels()[m]) ++m;
  return m;
}

// d(B, B2) = 1 / prefix_agreement; equal finite partitions give 1/n.
inline double prefix_distance(const SetPartition& a, const SetPartition& b) {
  return 1.0 / static_cast<double>(prefix_agreement(a, b));
}

}  // namespace pbm
