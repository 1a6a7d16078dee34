#pragma once

#include <cstdint>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "statlab/growth.hpp"
#include "statlab/rng.hpp"

namespace statlab {

/// Vertex of the infinite plane 3-regular tree, addressed by its path from the root.
///
/// The root has edges [child 0, child 1, child 2] in clockwise order, every other vertex
/// [parent, child 0, child 1]. Paths are stored run-length encoded, so the long straight
/// descents taken by contour rays cost O(1) per step.
class TreeAddress {
 public:
  TreeAddress();

  [[nodiscard]] bool is_root() const noexcept { return runs_.empty(); }
  [[nodiscard]] std::uint64_t depth() const noexcept { return depth_; }
  /// Structural hash; equal addresses hash equally.
  [[nodiscard]] std::uint64_t hash() const noexcept;

  /// Moves to child `c` (0..2 at the root, 0..1 elsewhere).
  void push(std::uint8_t c);
  /// Moves to the parent. Requires !is_root().
  void pop();
  /// Edge index of this vertex as seen from its parent. Requires !is_root().
  [[nodiscard]] std::uint8_t index_at_parent() const;

  /// Number of leading steps shared with `other`.
  [[nodiscard]] std::uint64_t common_prefix(const TreeAddress& other) const;
  /// The i-th step from the root (0-based).
  [[nodiscard]] std::uint8_t step(std::uint64_t i) const;

  friend bool operator==(const TreeAddress& a, const TreeAddress& b) noexcept;

 private:
  struct Run {
    std::uint8_t symbol;
    std::uint64_t length;
  };
  // The first run encodes the root child as symbol 2 + c with length 1, so it never merges.
  std::vector<Run> runs_;
  std::vector<std::uint64_t> prefix_hash_;  // hash of runs_[0, i)
  std::uint64_t depth_ = 0;
};

/// Labelling of the tree edges by independent fair ±1 signs, keyed by the child endpoint.
class EdgeLabels {
 public:
  explicit EdgeLabels(std::uint64_t key) : key_(key) {}
  [[nodiscard]] int label(const TreeAddress& child) const noexcept {
    return (mix64(child.hash() ^ key_) & 1u) != 0 ? 1 : -1;
  }
  /// Sum of labels from the root to `a`.
  [[nodiscard]] std::int64_t root_sum(const TreeAddress& a) const;
  /// Sum of labels along the tree path between a and b.
  [[nodiscard]] std::int64_t path_sum(const TreeAddress& a, const TreeAddress& b) const;

 private:
  std::uint64_t key_;
};

/// A resolved bridge: the contour ray from `source_corner` at `source` first returns to label
/// sum zero at `target_corner` of `target`.
struct Bridge {
  VertexId source;
  std::uint8_t source_corner;
  VertexId target;
  std::uint8_t target_corner;
};

/// Lazy bridged ternary tree. Exploring a vertex materialises its three tree neighbours and
/// all six bridges at its corners, searching along contour rays as far as necessary.
class BridgeTreeGrower final : public Grower {
 public:
  /// `expansion_budget` bounds the total number of contour steps taken over the grower's life.
  BridgeTreeGrower(Stream rng, std::uint64_t expansion_budget);

  /// Throws BudgetError when the contour search exceeds the budget.
  bool expand(RootedMultigraph& g, VertexId v) override;

  [[nodiscard]] const TreeAddress& address(VertexId v) const { return addresses_.at(index_of(v)); }
  [[nodiscard]] const EdgeLabels& labels() const noexcept { return labels_; }
  [[nodiscard]] const std::vector<Bridge>& bridges() const noexcept { return bridges_; }
  /// Labels of the tree edges present in the graph.
  [[nodiscard]] std::vector<int> tree_edge_labels() const;
  [[nodiscard]] std::uint64_t steps_used() const noexcept { return steps_used_; }
  [[nodiscard]] std::uint64_t longest_search() const noexcept { return longest_search_; }

  /// Registers the root; called once on a one-vertex graph.
  void attach_root(RootedMultigraph& g);

 private:
  struct RayEnd {
    TreeAddress address;
    std::uint8_t corner;
  };
  VertexId vertex_for(RootedMultigraph& g, const TreeAddress& a);
  RayEnd search(const TreeAddress& start, std::uint8_t corner, bool forward);

  EdgeLabels labels_;
  std::uint64_t budget_;
  std::uint64_t steps_used_ = 0;
  std::uint64_t longest_search_ = 0;
  std::vector<TreeAddress> addresses_;
  std::unordered_map<std::uint64_t, VertexId> index_;
  std::unordered_set<std::uint64_t> tree_edges_;  // keyed by child hash
  std::unordered_set<std::uint64_t> bridge_keys_;    // keyed by source hash and corner
  std::unordered_set<std::uint64_t> incoming_keys_;  // keyed by target hash and corner
  std::vector<Bridge> bridges_;
};

[[nodiscard]] Replica make_bridge_tree_replica(Stream rng, std::uint64_t expansion_budget);

/// Explores every vertex within tree distance core_radius of the root.
/// Throws BudgetError when the contour searches need more than `expansion_budget` steps.
[[nodiscard]] Replica sample_bridge_tree(std::uint32_t core_radius, std::uint64_t expansion_budget, Stream& rng);

}  // namespace statlab
