#include "statlab/growth.hpp"

#include <string>
#include <vector>

#include "statlab/errors.hpp"

namespace statlab {

bool LoopifyGrower::expand(RootedMultigraph& g, VertexId v) {
  if (!inner_->expand(g, v)) return false;
  loopify_vertex(g, v);
  return true;
}

bool ensure_explored(Replica& r, VertexId v) {
  if (!r.graph.is_frontier(v)) return true;
  if (!r.grower) return false;
  return r.grower->expand(r.graph, v) && !r.graph.is_frontier(v);
}

bool ensure_ball(Replica& r, VertexId x, std::uint32_t radius) {
  if (radius == 0) return true;
  // Expanding can only shorten distances, so repeat until no frontier vertex is left inside.
  for (;;) {
    const auto dist = distances_within(r.graph, x, radius - 1, FrontierPolicy::known_edges);
    std::vector<VertexId> pending;
    for (std::size_t i = 0; i < dist.size(); ++i) {
      if (dist[i] != unreached && r.graph.is_frontier(vertex_at(i))) pending.push_back(vertex_at(i));
    }
    if (pending.empty()) return true;
    for (VertexId v : pending) {
      if (!ensure_explored(r, v)) return false;
    }
  }
}

std::uint32_t distance_with_growth(Replica& r, VertexId u, VertexId v) {
  std::uint32_t d = graph_distance(r.graph, u, v, FrontierPolicy::known_edges);
  if (r.grower && r.grower->tree_like()) return d;
  for (;;) {
    if (!ensure_ball(r, u, d)) {
      throw FrontierError("cannot grow the graph far enough to measure distance " + std::to_string(d));
    }
    const std::uint32_t next = graph_distance(r.graph, u, v, FrontierPolicy::known_edges);
    if (next == d) return d;
    d = next;
  }
}

}  // namespace statlab
