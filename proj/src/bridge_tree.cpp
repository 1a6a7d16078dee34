#include "statlab/bridge_tree.hpp"

#include <algorithm>
#include <string>

#include "statlab/errors.hpp"

namespace statlab {

namespace {

constexpr std::uint64_t root_hash = 0x5bd1e9955bd1e995ULL;

constexpr std::uint64_t encode_run(std::uint8_t symbol, std::uint64_t length) noexcept {
  return (static_cast<std::uint64_t>(symbol) << 58) ^ length;
}

}  // namespace

TreeAddress::TreeAddress() = default;

std::uint64_t TreeAddress::hash() const noexcept {
  if (runs_.empty()) return root_hash;
  return hash_combine(prefix_hash_.back(), encode_run(runs_.back().symbol, runs_.back().length));
}

void TreeAddress::push(std::uint8_t c) {
  if (runs_.empty()) {
    if (c > 2) throw UsageError("root child index out of range");
    prefix_hash_.push_back(root_hash);
    runs_.push_back({static_cast<std::uint8_t>(2 + c), 1});
  } else {
    if (c > 1) throw UsageError("child index out of range");
    if (runs_.back().symbol == c) {
      ++runs_.back().length;
    } else {
      prefix_hash_.push_back(hash());
      runs_.push_back({c, 1});
    }
  }
  ++depth_;
}

void TreeAddress::pop() {
  if (runs_.empty()) throw UsageError("the root has no parent");
  if (--runs_.back().length == 0) {
    runs_.pop_back();
    prefix_hash_.pop_back();
  }
  --depth_;
}

std::uint8_t TreeAddress::index_at_parent() const {
  if (runs_.empty()) throw UsageError("the root has no parent");
  const auto s = runs_.back().symbol;
  return s >= 2 ? static_cast<std::uint8_t>(s - 2) : static_cast<std::uint8_t>(s + 1);
}

std::uint64_t TreeAddress::common_prefix(const TreeAddress& other) const {
  std::uint64_t shared = 0;
  for (std::size_t i = 0; i < std::min(runs_.size(), other.runs_.size()); ++i) {
    const auto& a = runs_[i];
    const auto& b = other.runs_[i];
    if (a.symbol != b.symbol) break;
    shared += std::min(a.length, b.length);
    if (a.length != b.length) break;
  }
  return shared;
}

std::uint8_t TreeAddress::step(std::uint64_t i) const {
  for (const auto& r : runs_) {
    if (i < r.length) return r.symbol >= 2 ? static_cast<std::uint8_t>(r.symbol - 2) : r.symbol;
    i -= r.length;
  }
  throw UsageError("step index beyond address depth");
}

bool operator==(const TreeAddress& a, const TreeAddress& b) noexcept {
  if (a.depth_ != b.depth_ || a.runs_.size() != b.runs_.size()) return false;
  for (std::size_t i = 0; i < a.runs_.size(); ++i) {
    if (a.runs_[i].symbol != b.runs_[i].symbol || a.runs_[i].length != b.runs_[i].length) return false;
  }
  return true;
}

namespace {

std::int64_t prefix_sum(const EdgeLabels& labels, const TreeAddress& a, std::uint64_t steps) {
  TreeAddress t;
  std::int64_t s = 0;
  for (std::uint64_t i = 0; i < steps; ++i) {
    t.push(a.step(i));
    s += labels.label(t);
  }
  return s;
}

}  // namespace

std::int64_t EdgeLabels::root_sum(const TreeAddress& a) const { return prefix_sum(*this, a, a.depth()); }

std::int64_t EdgeLabels::path_sum(const TreeAddress& a, const TreeAddress& b) const {
  const auto lca = a.common_prefix(b);
  return root_sum(a) + root_sum(b) - 2 * prefix_sum(*this, a, lca);
}

BridgeTreeGrower::BridgeTreeGrower(Stream rng, std::uint64_t expansion_budget)
    : labels_(rng()), budget_(expansion_budget) {
  if (expansion_budget == 0) throw UsageError("expansion budget must be positive");
}

void BridgeTreeGrower::attach_root(RootedMultigraph& g) {
  if (!addresses_.empty() || g.vertex_count() != 1) throw UsageError("bridge tree root already attached");
  addresses_.emplace_back();
  index_.emplace(addresses_.front().hash(), g.root());
  g.set_frontier(g.root(), true);
}

VertexId BridgeTreeGrower::vertex_for(RootedMultigraph& g, const TreeAddress& a) {
  const auto h = a.hash();
  if (auto it = index_.find(h); it != index_.end()) return it->second;
  const VertexId v = g.add_vertex(true);
  addresses_.push_back(a);
  index_.emplace(h, v);
  return v;
}

BridgeTreeGrower::RayEnd BridgeTreeGrower::search(const TreeAddress& start, std::uint8_t corner, bool forward) {
  // Corner c lies between edges c and c+1. The clockwise contour leaves corner c through
  // edge c+1 and enters the next vertex at the corner indexed by its arrival edge; the
  // reversed contour leaves through edge c and enters at arrival edge − 1.
  TreeAddress a = start;
  std::int64_t sum = 0;
  std::uint8_t leave = forward ? static_cast<std::uint8_t>((corner + 1) % 3) : corner;
  for (std::uint64_t steps = 1;; ++steps) {
    if (++steps_used_ > budget_) {
      throw BudgetError("bridge search exhausted the expansion budget of " + std::to_string(budget_) + " steps");
    }
    std::uint8_t arrival = 0;
    if (a.is_root()) {
      a.push(leave);
      sum += labels_.label(a);
    } else if (leave == 0) {
      arrival = a.index_at_parent();
      sum += labels_.label(a);
      a.pop();
    } else {
      a.push(static_cast<std::uint8_t>(leave - 1));
      sum += labels_.label(a);
    }
    const auto here = forward ? arrival : static_cast<std::uint8_t>((arrival + 2) % 3);
    if (sum == 0) {
      longest_search_ = std::max(longest_search_, steps);
      return {a, here};
    }
    leave = forward ? static_cast<std::uint8_t>((arrival + 1) % 3) : here;
  }
}

bool BridgeTreeGrower::expand(RootedMultigraph& g, VertexId v) {
  if (!g.is_frontier(v)) return true;
  const TreeAddress a = addresses_.at(index_of(v));

  auto connect_tree = [&](const TreeAddress& child, const TreeAddress& other) {
    if (!tree_edges_.insert(child.hash()).second) return;
    g.add_edge(v, vertex_for(g, other));
  };
  if (!a.is_root()) {
    TreeAddress parent = a;
    parent.pop();
    connect_tree(a, parent);
  }
  for (std::uint8_t c = 0; c < (a.is_root() ? 3 : 2); ++c) {
    TreeAddress child = a;
    child.push(c);
    connect_tree(child, child);
  }

  auto add_bridge = [&](const TreeAddress& src, std::uint8_t src_corner, const TreeAddress& dst,
                        std::uint8_t dst_corner) {
    if (!bridge_keys_.insert(hash_combine(src.hash(), src_corner)).second) return;
    incoming_keys_.insert(hash_combine(dst.hash(), dst_corner));
    const VertexId s = vertex_for(g, src);
    const VertexId t = vertex_for(g, dst);
    g.add_edge(s, t);
    bridges_.push_back({s, src_corner, t, dst_corner});
  };
  for (std::uint8_t corner = 0; corner < 3; ++corner) {
    if (!bridge_keys_.contains(hash_combine(a.hash(), corner))) {
      const auto end = search(a, corner, true);
      add_bridge(a, corner, end.address, end.corner);
    }
    if (!incoming_keys_.contains(hash_combine(a.hash(), corner))) {
      const auto end = search(a, corner, false);
      add_bridge(end.address, end.corner, a, corner);
    }
  }
  g.set_frontier(v, false);
  return true;
}

std::vector<int> BridgeTreeGrower::tree_edge_labels() const {
  std::vector<int> out;
  out.reserve(addresses_.size());
  for (const auto& a : addresses_) {
    if (!a.is_root() && tree_edges_.contains(a.hash())) out.push_back(labels_.label(a));
  }
  return out;
}

Replica make_bridge_tree_replica(Stream rng, std::uint64_t expansion_budget) {
  Replica r;
  r.graph = RootedMultigraph(1);
  auto grower = std::make_unique<BridgeTreeGrower>(rng, expansion_budget);
  grower->attach_root(r.graph);
  r.grower = std::move(grower);
  return r;
}

Replica sample_bridge_tree(std::uint32_t core_radius, std::uint64_t expansion_budget, Stream& rng) {
  Replica r = make_bridge_tree_replica(rng.split(rng()), expansion_budget);
  auto& grower = static_cast<BridgeTreeGrower&>(*r.grower);
  for (std::size_t i = 0; i < r.graph.vertex_count(); ++i) {
    const VertexId v = vertex_at(i);
    if (grower.address(v).depth() <= core_radius) grower.expand(r.graph, v);
  }
  return r;
}

}  // namespace statlab
