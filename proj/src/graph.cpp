#include "statlab/graph.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <tuple>

#include "statlab/errors.hpp"

namespace statlab {

RootedMultigraph::RootedMultigraph(std::size_t vertex_count)
    : adjacency_(std::max<std::size_t>(vertex_count, 1)),
      loops_(adjacency_.size(), 0),
      denominator_(adjacency_.size(), 0),
      frontier_(adjacency_.size(), 0) {}

VertexId RootedMultigraph::add_vertex(bool frontier) {
  check_mutable();
  adjacency_.emplace_back();
  loops_.push_back(0);
  denominator_.push_back(0);
  frontier_.push_back(frontier ? 1 : 0);
  if (frontier) ++frontier_count_;
  return vertex_at(adjacency_.size() - 1);
}

void RootedMultigraph::check(VertexId v) const {
  if (!contains(v)) {
    throw UsageError("vertex id " + std::to_string(index_of(v)) + " out of range (vertex_count " +
                     std::to_string(vertex_count()) + ")");
  }
}

void RootedMultigraph::check_mutable() const {
  if (frozen_) throw UsageError("graph is frozen");
}

void RootedMultigraph::bump(VertexId u, VertexId v, std::uint32_t multiplicity) {
  auto& list = adjacency_[index_of(u)];
  auto it = std::find_if(list.begin(), list.end(), [v](const Incidence& e) { return e.neighbor == v; });
  if (it == list.end()) {
    list.push_back({v, multiplicity});
  } else {
    it->count += multiplicity;
  }
  denominator_[index_of(u)] += multiplicity;
}

void RootedMultigraph::add_edge(VertexId u, VertexId v, std::uint32_t multiplicity) {
  check(u);
  check(v);
  check_mutable();
  if (multiplicity == 0) throw UsageError("edge multiplicity must be positive");
  if (u == v) {
    loops_[index_of(u)] += multiplicity;
    denominator_[index_of(u)] += multiplicity;
    return;
  }
  bump(u, v, multiplicity);
  bump(v, u, multiplicity);
}

std::uint32_t RootedMultigraph::edge_count(VertexId u, VertexId v) const {
  check(u);
  check(v);
  if (u == v) return loops_[index_of(u)];
  for (const auto& e : adjacency_[index_of(u)]) {
    if (e.neighbor == v) return e.count;
  }
  return 0;
}

std::uint32_t RootedMultigraph::loop_count(VertexId v) const {
  check(v);
  return loops_[index_of(v)];
}

std::uint64_t RootedMultigraph::degree_denominator(VertexId v) const {
  check(v);
  return denominator_[index_of(v)];
}

std::span<const Incidence> RootedMultigraph::neighbors(VertexId v) const {
  check(v);
  return adjacency_[index_of(v)];
}

bool RootedMultigraph::is_frontier(VertexId v) const {
  check(v);
  return frontier_[index_of(v)] != 0;
}

void RootedMultigraph::set_frontier(VertexId v, bool frontier) {
  check(v);
  check_mutable();
  auto& flag = frontier_[index_of(v)];
  if ((flag != 0) == frontier) return;
  flag = frontier ? 1 : 0;
  if (frontier) {
    ++frontier_count_;
  } else {
    --frontier_count_;
  }
}

bool operator==(const RootedMultigraph& a, const RootedMultigraph& b) {
  if (a.vertex_count() != b.vertex_count() || a.loops_ != b.loops_ || a.frontier_ != b.frontier_) return false;
  for (std::size_t i = 0; i < a.vertex_count(); ++i) {
    auto la = a.adjacency_[i];
    auto lb = b.adjacency_[i];
    auto by_id = [](const Incidence& x, const Incidence& y) { return x.neighbor < y.neighbor; };
    std::sort(la.begin(), la.end(), by_id);
    std::sort(lb.begin(), lb.end(), by_id);
    if (!std::equal(la.begin(), la.end(), lb.begin(), lb.end(), [](const Incidence& x, const Incidence& y) {
          return x.neighbor == y.neighbor && x.count == y.count;
        })) {
      return false;
    }
  }
  return true;
}

Ratio transition_ratio(const RootedMultigraph& g, VertexId u, VertexId v) {
  if (g.is_frontier(u)) {
    throw FrontierError("transition row of frontier vertex " + std::to_string(index_of(u)) + " is not known");
  }
  const std::uint64_t den = g.degree_denominator(u);
  if (den == 0) throw UsageError("vertex " + std::to_string(index_of(u)) + " is isolated");
  return {g.edge_count(u, v), den};
}

double transition_probability(const RootedMultigraph& g, VertexId u, VertexId v) {
  const Ratio r = transition_ratio(g, u, v);
  return static_cast<double>(r.num) / static_cast<double>(r.den);
}

namespace {

// Layered BFS. `visit(v, d)` is called once per reached vertex; returning true stops the search.
// A frontier vertex in layer k only blocks the search after layer k + 1 has been discovered
// through the other vertices, because its unseen neighbours are at distance >= k + 1.
template <class Visit>
void layered_bfs(const RootedMultigraph& g, VertexId source, std::uint32_t radius, FrontierPolicy policy,
                 std::vector<std::uint32_t>& dist, Visit&& visit) {
  dist.assign(g.vertex_count(), unreached);
  dist[index_of(source)] = 0;
  if (visit(source, 0u)) return;
  std::vector<VertexId> layer{source};
  std::vector<VertexId> next;
  for (std::uint32_t d = 0; d < radius && !layer.empty(); ++d) {
    next.clear();
    VertexId blocked{};
    bool is_blocked = false;
    for (VertexId u : layer) {
      if (policy == FrontierPolicy::strict && g.is_frontier(u)) {
        if (!is_blocked) blocked = u;
        is_blocked = true;
        continue;
      }
      for (const auto& e : g.neighbors(u)) {
        auto& dv = dist[index_of(e.neighbor)];
        if (dv != unreached) continue;
        dv = d + 1;
        next.push_back(e.neighbor);
        if (visit(e.neighbor, d + 1)) return;
      }
    }
    if (is_blocked) {
      throw FrontierError("search needs the neighbourhood of frontier vertex " + std::to_string(index_of(blocked)) +
                          " at distance " + std::to_string(d));
    }
    layer.swap(next);
  }
}

}  // namespace

std::uint32_t graph_distance(const RootedMultigraph& g, VertexId u, VertexId v, FrontierPolicy policy) {
  if (!g.contains(u) || !g.contains(v)) throw UsageError("vertex id out of range");
  if (u == v) return 0;
  std::vector<std::uint32_t> dist;
  std::uint32_t found = unreached;
  layered_bfs(g, u, unreached, policy, dist, [&](VertexId w, std::uint32_t d) {
    if (w == v) {
      found = d;
      return true;
    }
    return false;
  });
  if (found == unreached) throw UsageError("vertices are not connected");
  return found;
}

std::vector<std::uint32_t> distances_within(const RootedMultigraph& g, VertexId source, std::uint32_t radius,
                                            FrontierPolicy policy) {
  if (!g.contains(source)) throw UsageError("vertex id out of range");
  std::vector<std::uint32_t> dist;
  layered_bfs(g, source, radius, policy, dist, [](VertexId, std::uint32_t) { return false; });
  return dist;
}

BallProfile ball_profile(const RootedMultigraph& g, std::uint32_t r_max) { return ball_profile(g, g.root(), r_max); }

BallProfile ball_profile(const RootedMultigraph& g, VertexId center, std::uint32_t r_max) {
  const auto dist = distances_within(g, center, r_max);
  BallProfile profile;
  profile.sphere_sizes.assign(r_max + 1, 0);
  for (auto d : dist) {
    if (d != unreached) ++profile.sphere_sizes[d];
  }
  profile.sizes.resize(r_max + 1);
  std::uint64_t running = 0;
  for (std::uint32_t r = 0; r <= r_max; ++r) {
    running += profile.sphere_sizes[r];
    profile.sizes[r] = running;
  }
  return profile;
}

void loopify_vertex(RootedMultigraph& g, VertexId v) {
  const auto d = g.degree_denominator(v);
  if (d > 0) g.add_loops(v, static_cast<std::uint32_t>(d));
}

RootedMultigraph loopify(const RootedMultigraph& g) {
  RootedMultigraph out = g;
  if (out.frozen()) {
    // Copy out of a frozen graph into a fresh mutable one.
    RootedMultigraph fresh(g.vertex_count());
    for (std::size_t i = 0; i < g.vertex_count(); ++i) {
      const VertexId u = vertex_at(i);
      for (const auto& e : g.neighbors(u)) {
        if (index_of(e.neighbor) > i) fresh.add_edge(u, e.neighbor, e.count);
      }
      if (g.loop_count(u) > 0) fresh.add_loops(u, g.loop_count(u));
      fresh.set_frontier(u, g.is_frontier(u));
    }
    out = std::move(fresh);
  }
  for (std::size_t i = 0; i < g.vertex_count(); ++i) {
    const VertexId v = vertex_at(i);
    if (!g.is_frontier(v)) loopify_vertex(out, v);
  }
  return out;
}

void write_graph(std::ostream& out, const RootedMultigraph& g) {
  out << "verts " << g.vertex_count() << " root 0\n";
  std::vector<std::tuple<std::uint32_t, std::uint32_t, std::uint32_t>> lines;
  for (std::size_t i = 0; i < g.vertex_count(); ++i) {
    const VertexId u = vertex_at(i);
    if (g.loop_count(u) > 0) lines.emplace_back(index_of(u), index_of(u), g.loop_count(u));
    for (const auto& e : g.neighbors(u)) {
      if (index_of(e.neighbor) > i) lines.emplace_back(index_of(u), index_of(e.neighbor), e.count);
    }
  }
  std::sort(lines.begin(), lines.end());
  for (const auto& [u, v, m] : lines) out << u << ' ' << v << ' ' << m << '\n';
  for (std::size_t i = 0; i < g.vertex_count(); ++i) {
    if (g.is_frontier(vertex_at(i))) out << "frontier " << i << '\n';
  }
}

RootedMultigraph read_graph(std::istream& in) {
  std::string line;
  std::size_t line_no = 1;
  // Leading `#` lines carry provenance (seed, parameters) and are skipped.
  while (std::getline(in, line) && line.rfind('#', 0) == 0) ++line_no;
  if (!in && line.empty()) throw UsageError("graph file: missing header");
  std::istringstream header(line);
  std::string verts_kw, root_kw;
  std::size_t n = 0;
  std::uint32_t root = 0;
  if (!(header >> verts_kw >> n >> root_kw >> root) || verts_kw != "verts" || root_kw != "root" || root != 0 ||
      n == 0) {
    throw UsageError("graph file: header must read `verts N root 0`");
  }
  RootedMultigraph g(n);
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    if (line.rfind("frontier", 0) == 0) {
      std::string kw;
      std::uint64_t v = 0;
      if (!(fields >> kw >> v) || v >= n) throw UsageError("graph file: bad frontier line " + std::to_string(line_no));
      g.set_frontier(vertex_at(v), true);
      continue;
    }
    std::uint64_t u = 0, v = 0, m = 0;
    if (!(fields >> u >> v >> m) || u >= n || v >= n || m == 0) {
      throw UsageError("graph file: bad edge line " + std::to_string(line_no));
    }
    g.add_edge(vertex_at(u), vertex_at(v), static_cast<std::uint32_t>(m));
  }
  return g;
}

}  // namespace statlab
