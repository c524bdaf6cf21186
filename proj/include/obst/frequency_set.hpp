#pragma once
#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "obst/errors.hpp"

namespace obst {

using Cost = std::uint64_t;

// A problem instance: n keys with integer access weights plus n+1 gap weights
// for the failed-search leaves between and around the keys. Integer weights
// keep every comparison exact and the tie-break deterministic; probability
// inputs are scaled to integers before they get here.
class FrequencySet {
public:
  // `keys` holds the n key weights, `gaps` the n+1 gap weights.
  FrequencySet(std::vector<Cost> keys, std::vector<Cost> gaps)
      : key_(std::move(keys)), gap_(std::move(gaps)) {
    if (key_.empty())
      throw InstanceError("instance needs at least one key");
    if (gap_.size() != key_.size() + 1)
      throw InstanceError("gap weight count must be key count + 1");
    Cost total = 0;
    const Cost limit = std::numeric_limits<Cost>::max() / (static_cast<Cost>(n()) + 1);
    auto add = [&](Cost w) {
      if (w > limit || total > limit - w)
        throw InstanceError("instance too large: weight sum times (n+1) overflows 64 bits");
      total += w;
    };
    for (Cost w : key_)
      add(w);
    for (Cost w : gap_)
      add(w);
    if (total == 0)
      throw InstanceError("instance needs at least one positive weight");
    total_ = total;
  }

  int n() const { return static_cast<int>(key_.size()); }

  // Key weights are 1-based (key 1..n), gap weights 0-based (d_0..d_n).
  Cost key_weight(int i) const { return key_[static_cast<std::size_t>(i) - 1]; }
  Cost gap_weight(int i) const { return gap_[static_cast<std::size_t>(i)]; }
  Cost total_weight() const { return total_; }

  const std::vector<Cost>& key_weights() const { return key_; }
  const std::vector<Cost>& gap_weights() const { return gap_; }

  friend bool operator==(const FrequencySet& a, const FrequencySet& b) {
    return a.key_ == b.key_ && a.gap_ == b.gap_;
  }

private:
  std::vector<Cost> key_;
  std::vector<Cost> gap_;
  Cost total_ = 0;
};

} // namespace obst
