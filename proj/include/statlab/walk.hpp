#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include "statlab/graph.hpp"
#include "statlab/growth.hpp"

namespace statlab {

struct WalkTrace {
  std::vector<VertexId> vertices;
  std::uint64_t seed = 0;
  /// Set when growth failed; the trace then ends at the vertex that could not be explored.
  bool touched_frontier = false;
};

/// Explores a frontier vertex; returns false when that is impossible.
using GrowCallback = std::function<bool(RootedMultigraph&, VertexId)>;

/// Simple random walk of n steps from `start`. Each step picks an incident edge or loop
/// uniformly, with each loop counted once. Frontier vertices are handed to `grow` before the
/// walk steps onto them; without a callback that is a FrontierError.
[[nodiscard]] WalkTrace sample_walk(RootedMultigraph& g, VertexId start, std::uint64_t n, std::uint64_t seed,
                                    const GrowCallback& grow = {});
/// Same, growing through the replica's grower (or failing softly when it has none).
[[nodiscard]] WalkTrace sample_walk(Replica& r, VertexId start, std::uint64_t n, std::uint64_t seed);

/// d(x_0, x_k) for every k, by one breadth-first search over known edges. Exact on trees and
/// whenever the ball reaching the farthest visited vertex is explored.
[[nodiscard]] std::vector<std::uint32_t> distance_profile(const WalkTrace& trace, const RootedMultigraph& g);

/// Same, but first grows the replica until the known-edge distances of all trace vertices are
/// exact. Throws FrontierError if the replica cannot grow far enough.
[[nodiscard]] std::vector<std::uint32_t> distance_profile(const WalkTrace& trace, Replica& r);

/// CSV `step,vertex,distance` preceded by a `# seed=<seed>` line.
void write_trace_csv(std::ostream& out, const WalkTrace& trace, const std::vector<std::uint32_t>& distances);

}  // namespace statlab
