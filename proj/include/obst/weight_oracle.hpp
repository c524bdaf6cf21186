#pragma once
#include <vector>

#include "obst/frequency_set.hpp"

namespace obst {

// Prefix sums over an instance so that w(i,j) = p_{i+1}+...+p_j + q_i+...+q_j
// is answered in constant time.
class WeightOracle {
public:
  explicit WeightOracle(const FrequencySet& fs) : n_(fs.n()) {
    key_prefix_.resize(static_cast<std::size_t>(n_) + 1);
    gap_prefix_.resize(static_cast<std::size_t>(n_) + 1);
    key_prefix_[0] = 0;
    for (int i = 1; i <= n_; ++i)
      key_prefix_[static_cast<std::size_t>(i)] =
          key_prefix_[static_cast<std::size_t>(i) - 1] + fs.key_weight(i);
    gap_prefix_[0] = fs.gap_weight(0);
    for (int i = 1; i <= n_; ++i)
      gap_prefix_[static_cast<std::size_t>(i)] =
          gap_prefix_[static_cast<std::size_t>(i) - 1] + fs.gap_weight(i);
  }

  int n() const { return n_; }

  Cost key_prefix(int j) const { return key_prefix_[static_cast<std::size_t>(j)]; }
  // gap_prefix(j) = q_0 + ... + q_j
  Cost gap_prefix(int j) const { return gap_prefix_[static_cast<std::size_t>(j)]; }

  Cost weight(int i, int j) const {
    if (i < 0 || j > n_ || i > j)
      throw ContractError("weight(i,j) requires 0 <= i <= j <= n");
    Cost keys = key_prefix_[static_cast<std::size_t>(j)] - key_prefix_[static_cast<std::size_t>(i)];
    Cost gaps = gap_prefix_[static_cast<std::size_t>(j)] -
                (i > 0 ? gap_prefix_[static_cast<std::size_t>(i) - 1] : 0);
    return keys + gaps;
  }

private:
  int n_;
  std::vector<Cost> key_prefix_;
  std::vector<Cost> gap_prefix_;
};

inline WeightOracle build_weight_oracle(const FrequencySet& fs) { return WeightOracle(fs); }

} // namespace obst
