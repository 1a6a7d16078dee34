#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

namespace statlab {

/// Dense vertex index. Vertex 0 is always the root.
enum class VertexId : std::uint32_t {};

constexpr std::uint32_t index_of(VertexId v) noexcept { return static_cast<std::uint32_t>(v); }
constexpr VertexId vertex_at(std::size_t i) noexcept { return static_cast<VertexId>(i); }

/// One entry of a vertex's adjacency list: a distinct neighbour and the number of parallel edges.
struct Incidence {
  VertexId neighbor;
  std::uint32_t count;
};

/// Exact one-step transition probability as an integer ratio.
struct Ratio {
  std::uint64_t num = 0;
  std::uint64_t den = 1;
};

/// Rooted multigraph with loop counts and a frontier marker.
///
/// A loop contributes once to the degree denominator of its vertex, so a vertex with one
/// loop and one edge to y steps to y with probability 1/2. Frontier vertices are
/// generated but not yet explored: their adjacency may be incomplete, and every
/// operation that needs their full neighbourhood raises FrontierError.
class RootedMultigraph {
 public:
  explicit RootedMultigraph(std::size_t vertex_count = 1);

  VertexId add_vertex(bool frontier = false);

  /// Adds `multiplicity` parallel edges between u and v; u == v adds loops.
  void add_edge(VertexId u, VertexId v, std::uint32_t multiplicity = 1);

  /// Adds loops at v.
  void add_loops(VertexId v, std::uint32_t count) { add_edge(v, v, count); }

  /// Number of edges joining u and v; for u == v the loop count.
  [[nodiscard]] std::uint32_t edge_count(VertexId u, VertexId v) const;
  [[nodiscard]] std::uint32_t loop_count(VertexId v) const;

  /// Sum of multiplicities to other vertices plus the loop count.
  [[nodiscard]] std::uint64_t degree_denominator(VertexId v) const;

  /// Distinct non-loop neighbours of v with multiplicities, in insertion order.
  [[nodiscard]] std::span<const Incidence> neighbors(VertexId v) const;

  [[nodiscard]] bool is_frontier(VertexId v) const;
  void set_frontier(VertexId v, bool frontier);
  [[nodiscard]] std::size_t frontier_count() const noexcept { return frontier_count_; }

  [[nodiscard]] std::size_t vertex_count() const noexcept { return adjacency_.size(); }
  [[nodiscard]] static constexpr VertexId root() noexcept { return VertexId{0}; }
  [[nodiscard]] bool contains(VertexId v) const noexcept { return index_of(v) < adjacency_.size(); }

  /// Marks the graph immutable; later mutation throws.
  void freeze() noexcept { frozen_ = true; }
  [[nodiscard]] bool frozen() const noexcept { return frozen_; }

  friend bool operator==(const RootedMultigraph& a, const RootedMultigraph& b);

 private:
  void check(VertexId v) const;
  void check_mutable() const;
  void bump(VertexId u, VertexId v, std::uint32_t multiplicity);

  std::vector<std::vector<Incidence>> adjacency_;
  std::vector<std::uint32_t> loops_;
  std::vector<std::uint64_t> denominator_;
  std::vector<std::uint8_t> frontier_;
  std::size_t frontier_count_ = 0;
  bool frozen_ = false;
};

/// |B_r(root)| and |S_r(root)| for r = 0..r_max.
struct BallProfile {
  std::vector<std::uint64_t> sizes;
  std::vector<std::uint64_t> sphere_sizes;

  [[nodiscard]] std::size_t r_max() const noexcept { return sizes.empty() ? 0 : sizes.size() - 1; }
};

/// How breadth-first search treats frontier vertices.
enum class FrontierPolicy {
  /// Expanding a frontier vertex is an error: its unseen edges could shorten paths.
  strict,
  /// Traverse frontier vertices using their known edges. Exact when the generated part is a
  /// subtree of a tree, since unseen edges can only lead to unseen vertices.
  known_edges,
};

[[nodiscard]] Ratio transition_ratio(const RootedMultigraph& g, VertexId u, VertexId v);
[[nodiscard]] double transition_probability(const RootedMultigraph& g, VertexId u, VertexId v);

[[nodiscard]] std::uint32_t graph_distance(const RootedMultigraph& g, VertexId u, VertexId v,
                                           FrontierPolicy policy = FrontierPolicy::strict);

/// BFS distances from `source` for every vertex within `radius`.
/// Unreached vertices get `unreached`.
inline constexpr std::uint32_t unreached = 0xffffffffu;
[[nodiscard]] std::vector<std::uint32_t> distances_within(const RootedMultigraph& g, VertexId source,
                                                          std::uint32_t radius,
                                                          FrontierPolicy policy = FrontierPolicy::strict);

/// Exact ball and sphere sizes around the root. Requires every vertex at distance
/// below r_max to be explored.
[[nodiscard]] BallProfile ball_profile(const RootedMultigraph& g, std::uint32_t r_max);
[[nodiscard]] BallProfile ball_profile(const RootedMultigraph& g, VertexId center, std::uint32_t r_max);

/// Adds degree_denominator(y) loops at every explored vertex y, halving every off-diagonal
/// transition probability. Frontier vertices are left alone; their degree is not final.
[[nodiscard]] RootedMultigraph loopify(const RootedMultigraph& g);
void loopify_vertex(RootedMultigraph& g, VertexId v);

/// Line format: `verts N root 0`, one `u v multiplicity` line per vertex pair (u <= v,
/// loops as `v v count`) in lexicographic order, then one `frontier v` line per frontier vertex.
/// The reader skips lines starting with `#`.
void write_graph(std::ostream& out, const RootedMultigraph& g);
[[nodiscard]] RootedMultigraph read_graph(std::istream& in);

}  // namespace statlab

template <>
struct std::hash<statlab::VertexId> {
  std::size_t operator()(statlab::VertexId v) const noexcept { return statlab::index_of(v); }
};
