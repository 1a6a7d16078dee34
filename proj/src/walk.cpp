#include "statlab/walk.hpp"

#include <algorithm>
#include <ostream>
#include <string>

#include "statlab/errors.hpp"
#include "statlab/rng.hpp"

namespace statlab {

namespace {

VertexId step_from(const RootedMultigraph& g, VertexId x, Stream& rng) {
  const auto den = g.degree_denominator(x);
  if (den == 0) throw UsageError("walk reached isolated vertex " + std::to_string(index_of(x)));
  auto u = rng.below(den);
  const auto loops = g.loop_count(x);
  if (u < loops) return x;
  u -= loops;
  for (const auto& e : g.neighbors(x)) {
    if (u < e.count) return e.neighbor;
    u -= e.count;
  }
  throw AssertionError("degree denominator out of sync with adjacency");
}

}  // namespace

WalkTrace sample_walk(RootedMultigraph& g, VertexId start, std::uint64_t n, std::uint64_t seed,
                      const GrowCallback& grow) {
  WalkTrace trace;
  trace.seed = seed;
  trace.vertices.reserve(n + 1);
  Stream rng(seed);
  auto explore = [&](VertexId v) {
    if (!g.is_frontier(v)) return true;
    if (!grow) throw FrontierError("walk needs frontier vertex " + std::to_string(index_of(v)) + " explored");
    return grow(g, v) && !g.is_frontier(v);
  };
  VertexId x = start;
  trace.vertices.push_back(x);
  if (!explore(x)) {
    trace.touched_frontier = true;
    return trace;
  }
  for (std::uint64_t i = 0; i < n; ++i) {
    const VertexId y = step_from(g, x, rng);
    trace.vertices.push_back(y);
    if (!explore(y)) {
      trace.touched_frontier = true;
      return trace;
    }
    x = y;
  }
  return trace;
}

WalkTrace sample_walk(Replica& r, VertexId start, std::uint64_t n, std::uint64_t seed) {
  GrowCallback grow = [&r](RootedMultigraph&, VertexId v) { return ensure_explored(r, v); };
  return sample_walk(r.graph, start, n, seed, grow);
}

std::vector<std::uint32_t> distance_profile(const WalkTrace& trace, const RootedMultigraph& g) {
  if (trace.vertices.empty()) return {};
  const auto dist = distances_within(g, trace.vertices.front(), unreached, FrontierPolicy::known_edges);
  std::vector<std::uint32_t> out;
  out.reserve(trace.vertices.size());
  for (auto v : trace.vertices) {
    const auto d = dist.at(index_of(v));
    if (d == unreached) throw UsageError("trace vertex not connected to its start");
    out.push_back(d);
  }
  return out;
}

std::vector<std::uint32_t> distance_profile(const WalkTrace& trace, Replica& r) {
  if (trace.vertices.empty()) return {};
  if (r.grower && r.grower->tree_like()) return distance_profile(trace, r.graph);
  // Distances of at most `radius` are exact once the ball below that radius is explored.
  for (;;) {
    const auto d = distance_profile(trace, r.graph);
    const auto radius = *std::max_element(d.begin(), d.end());
    if (!ensure_ball(r, trace.vertices.front(), radius)) throw FrontierError("cannot explore the ball around the trace");
    if (distance_profile(trace, r.graph) == d) return d;
  }
}

void write_trace_csv(std::ostream& out, const WalkTrace& trace, const std::vector<std::uint32_t>& distances) {
  out << "# seed=" << trace.seed << " touched_frontier=" << (trace.touched_frontier ? "true" : "false") << '\n';
  out << "step,vertex,distance\n";
  for (std::size_t k = 0; k < trace.vertices.size(); ++k) {
    out << k << ',' << index_of(trace.vertices[k]) << ',' << distances.at(k) << '\n';
  }
}

}  // namespace statlab
