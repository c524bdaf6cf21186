#pragma once
#include <vector>

#include "obst/dp_tables.hpp"
#include "obst/frequency_set.hpp"

namespace obst {

// Explicit search tree: n internal vertices (keys 1..n) and n+1 dummy leaves
// d_0..d_n. Children are indices into `nodes`; a negative reference encodes a
// dummy leaf.
struct BstTree {
  struct Node {
    int key = 0;    // 1..n
    int left = 0;   // node index or dummy reference
    int right = 0;
  };

  std::vector<Node> nodes;
  int root = 0;

  static int dummy_ref(int d) { return -d - 1; }
  static bool is_dummy(int ref) { return ref < 0; }
  static int dummy_index(int ref) { return -ref - 1; }
};

// Expands the cut table top-down: interval (i,j) roots at key cut[i,j]+1,
// interval (i,i) is the dummy leaf d_i.
inline BstTree reconstruct_tree(const DpTables& dp) {
  BstTree tree;
  tree.nodes.reserve(static_cast<std::size_t>(dp.n()));
  auto expand = [&](auto&& self, int i, int j) -> int {
    if (i == j)
      return BstTree::dummy_ref(i);
    const int k = dp.cut(i, j);
    if (k < i || k > j - 1)
      throw TableError("corrupt cut table: cut(" + std::to_string(i) + "," + std::to_string(j) +
                       ") = " + std::to_string(k));
    const int at = static_cast<int>(tree.nodes.size());
    tree.nodes.push_back({k + 1, 0, 0});
    tree.nodes[static_cast<std::size_t>(at)].left = self(self, i, k);
    tree.nodes[static_cast<std::size_t>(at)].right = self(self, k + 1, j);
    return at;
  };
  tree.root = expand(expand, 0, dp.n());
  return tree;
}

// Overall search cost: sum of depth * weight over keys and dummy leaves,
// with the root at depth 1.
inline Cost tree_cost(const BstTree& tree, const FrequencySet& fs) {
  if (tree.nodes.size() != static_cast<std::size_t>(fs.n()))
    throw TableError("tree/instance size mismatch: " + std::to_string(tree.nodes.size()) +
                     " keys vs n=" + std::to_string(fs.n()));
  Cost total = 0;
  auto walk = [&](auto&& self, int ref, Cost depth) -> void {
    if (BstTree::is_dummy(ref)) {
      total += depth * fs.gap_weight(BstTree::dummy_index(ref));
      return;
    }
    const auto& node = tree.nodes[static_cast<std::size_t>(ref)];
    total += depth * fs.key_weight(node.key);
    self(self, node.left, depth + 1);
    self(self, node.right, depth + 1);
  };
  walk(walk, tree.root, 1);
  return total;
}

} // namespace obst
