#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pbm/errors.hpp"
#include "pbm/partition.hpp"

namespace pbm {

// Maximum number of states for any dense matrix over P_[n]^(k).
inline constexpr std::uint64_t kMaxStates = 50000;

// Enumerated P_[n]^(k) with a reverse index.
class StateSpace {
 public:
  StateSpace() = default;

  StateSpace(int n, int k) : n_(n), k_(k) {
    if (n < 1 || k < 1) throw domain_error("state space: n and k must be positive");
    if (count_partitions(n, k) > kMaxStates)
      throw size_error("state space: more than " + std::to_string(kMaxStates) + " states");
    states_ = enumerate(n, k);
    build_index();
  }

  // Adopts an explicit list (e.g. read from JSON); every state must be over [n]
  // with at most k blocks and the list must be free of duplicates.
  StateSpace(int n, int k, std::vector<SetPartition> states) : n_(n), k_(k), states_(std::move(states)) {
    for (const auto& s : states_) {
      if (s.size() != n_) throw dimension_error("state space: state over the wrong ground set");
      if (s.block_count() > k_) throw state_error("state space: state with more than k blocks");
    }
    build_index();
    if (index_.size() != states_.size()) throw domain_error("state space: duplicate states");
  }

  int n() const { return n_; }
  int k() const { return k_; }
  std::size_t size() const { return states_.size(); }
  const std::vector<SetPartition>& states() const { return states_; }
  const SetPartition& operator[](std::size_t i) const { return states_[i]; }

  std::optional<std::size_t> find(const SetPartition& b) const {
    auto it = index_.find(b.labels());
    if (b.size() != n_ || it == index_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t index_of(const SetPartition& b) const {
    auto i = find(b);
    if (!i) throw state_error("state " + b.to_string() + " is not in P_[" + std::to_string(n_) + "]^(" +
                              std::to_string(k_) + ")");
    return *i;
  }

 private:
  void build_index() {
    for (std::size_t i = 0; i < states_.size(); ++i) index_.emplace(states_[i].labels(), i);
  }

  int n_ = 0;
  int k_ = 0;
  std::vector<SetPartition> states_;
  std::map<std::vector<int>, std::size_t> index_;
};

}  // namespace pbm
