#pragma once

// Brute-force references used by the unit tests and the acceptance suite. Everything here is
// deliberately independent of the library's kernel code: graphs are plain edge lists, transition
// matrices are dense, and the joint law of two walk positions is enumerated path by path.

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <set>
#include <utility>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "statlab/graph.hpp"

namespace statlab::testing {

struct EdgeListGraph {
  std::string name;
  std::uint32_t n = 0;
  struct Edge {
    std::uint32_t u, v, mult;
  };
  std::vector<Edge> edges;  // u != v
  std::vector<std::uint32_t> loops;

  [[nodiscard]] RootedMultigraph build() const {
    RootedMultigraph g(n);
    for (const auto& e : edges) g.add_edge(vertex_at(e.u), vertex_at(e.v), e.mult);
    for (std::uint32_t v = 0; v < n; ++v) {
      if (loops[v] > 0) g.add_loops(vertex_at(v), loops[v]);
    }
    return g;
  }

  [[nodiscard]] std::vector<std::uint64_t> denominators() const {
    std::vector<std::uint64_t> d(loops.begin(), loops.end());
    for (const auto& e : edges) {
      d[e.u] += e.mult;
      d[e.v] += e.mult;
    }
    return d;
  }

  /// Adds deg(v) loops at every vertex, computed from the edge list.
  [[nodiscard]] EdgeListGraph loopified() const {
    EdgeListGraph out = *this;
    out.name += "+loopify";
    const auto d = denominators();
    for (std::uint32_t v = 0; v < n; ++v) out.loops[v] += static_cast<std::uint32_t>(d[v]);
    return out;
  }
};

inline bool connected_mask(std::uint32_t n, std::uint32_t mask, const std::vector<std::pair<int, int>>& pairs) {
  std::vector<int> seen(n, 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  while (!stack.empty()) {
    const int x = stack.back();
    stack.pop_back();
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      if (!(mask >> i & 1u)) continue;
      auto [a, b] = pairs[i];
      const int y = a == x ? b : b == x ? a : -1;
      if (y >= 0 && !seen[y]) {
        seen[y] = 1;
        stack.push_back(y);
      }
    }
  }
  return std::all_of(seen.begin(), seen.end(), [](int s) { return s != 0; });
}

/// All connected simple graphs on n vertices up to isomorphism, via minimum relabelled edge mask.
inline std::vector<EdgeListGraph> connected_simple_graphs(std::uint32_t n) {
  std::vector<std::pair<int, int>> pairs;
  std::vector<std::vector<int>> index(n, std::vector<int>(n, -1));
  for (std::uint32_t a = 0; a < n; ++a) {
    for (std::uint32_t b = a + 1; b < n; ++b) {
      index[a][b] = index[b][a] = static_cast<int>(pairs.size());
      pairs.emplace_back(a, b);
    }
  }
  std::vector<std::vector<int>> perm_maps;
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  do {
    std::vector<int> m(pairs.size());
    for (std::size_t i = 0; i < pairs.size(); ++i) m[i] = index[perm[pairs[i].first]][perm[pairs[i].second]];
    perm_maps.push_back(std::move(m));
  } while (std::next_permutation(perm.begin(), perm.end()));

  std::vector<std::uint32_t> canon;
  const std::uint32_t total = 1u << pairs.size();
  for (std::uint32_t mask = 0; mask < total; ++mask) {
    if (!connected_mask(n, mask, pairs)) continue;
    std::uint32_t best = std::numeric_limits<std::uint32_t>::max();
    for (const auto& m : perm_maps) {
      std::uint32_t image = 0;
      for (std::size_t i = 0; i < pairs.size(); ++i) {
        if (mask >> i & 1u) image |= 1u << m[i];
      }
      best = std::min(best, image);
    }
    if (best == mask) canon.push_back(mask);
  }
  std::vector<EdgeListGraph> out;
  for (auto mask : canon) {
    EdgeListGraph g;
    g.name = "simple" + std::to_string(n) + "_" + std::to_string(mask);
    g.n = n;
    g.loops.assign(n, 0);
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      if (mask >> i & 1u) g.edges.push_back({static_cast<std::uint32_t>(pairs[i].first),
                                             static_cast<std::uint32_t>(pairs[i].second), 1});
    }
    out.push_back(std::move(g));
  }
  return out;
}

/// Connected multigraph on n vertices: a random spanning tree, extra edges with multiplicity
/// up to 3, and random loop counts.
inline EdgeListGraph random_multigraph(std::mt19937_64& rng, std::uint32_t max_vertices) {
  std::uniform_int_distribution<std::uint32_t> nv(2, max_vertices);
  EdgeListGraph g;
  g.n = nv(rng);
  g.loops.assign(g.n, 0);
  auto pick = [&](std::uint32_t hi) { return std::uniform_int_distribution<std::uint32_t>(0, hi)(rng); };
  for (std::uint32_t v = 1; v < g.n; ++v) g.edges.push_back({pick(v - 1), v, 1 + pick(2)});
  const std::uint32_t extra = pick(g.n);
  for (std::uint32_t i = 0; i < extra; ++i) {
    const auto a = pick(g.n - 1);
    const auto b = pick(g.n - 1);
    if (a != b) g.edges.push_back({a, b, 1 + pick(2)});
  }
  for (std::uint32_t v = 0; v < g.n; ++v) {
    if (pick(2) == 0) g.loops[v] = 1 + pick(3);
  }
  return g;
}

/// Catalog for the kernel oracle tests: every connected simple graph with 2..6 vertices, each
/// also loopified and with doubled first edge plus a root loop, a loop-only vertex, and
/// `random_count` random multigraphs with at most 8 vertices.
inline std::vector<EdgeListGraph> kernel_catalog(std::uint32_t random_count = 100, std::uint64_t seed = 20240917) {
  std::vector<EdgeListGraph> out;
  EdgeListGraph single;
  single.name = "loop_only";
  single.n = 1;
  single.loops = {1};
  out.push_back(single);
  for (std::uint32_t n = 2; n <= 6; ++n) {
    for (auto& g : connected_simple_graphs(n)) {
      auto lazy = g.loopified();
      auto multi = g;
      multi.name += "+multi";
      multi.edges.front().mult = 2;
      multi.loops[0] += 1;
      out.push_back(std::move(g));
      out.push_back(std::move(lazy));
      out.push_back(std::move(multi));
    }
  }
  std::mt19937_64 rng(seed);
  for (std::uint32_t i = 0; i < random_count; ++i) {
    auto g = random_multigraph(rng, 8);
    g.name = "random_" + std::to_string(i);
    out.push_back(std::move(g));
  }
  return out;
}

/// Dense transition matrix with the once-counted loop convention.
inline Eigen::MatrixXd dense_transition(const EdgeListGraph& g) {
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(g.n, g.n);
  const auto d = g.denominators();
  for (const auto& e : g.edges) {
    p(e.u, e.v) += static_cast<double>(e.mult) / static_cast<double>(d[e.u]);
    p(e.v, e.u) += static_cast<double>(e.mult) / static_cast<double>(d[e.v]);
  }
  for (std::uint32_t v = 0; v < g.n; ++v) p(v, v) += static_cast<double>(g.loops[v]) / static_cast<double>(d[v]);
  return p;
}

/// Rows p^n(x, ·) for n = 0..n_max by repeated dense multiplication.
inline std::vector<Eigen::RowVectorXd> dense_laws(const Eigen::MatrixXd& p, std::uint32_t x, std::uint32_t n_max) {
  std::vector<Eigen::RowVectorXd> laws;
  Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(p.rows());
  row(x) = 1.0;
  laws.push_back(row);
  for (std::uint32_t i = 0; i < n_max; ++i) laws.push_back(laws.back() * p);
  return laws;
}

inline double dense_entropy(const Eigen::RowVectorXd& q) {
  double h = 0.0;
  for (Eigen::Index i = 0; i < q.size(); ++i) {
    if (q(i) > 0.0) h -= q(i) * std::log(q(i));
  }
  return h;
}

/// Mutual information of (x_m, x_n) from the joint law p^m(x,y) P^{n−m}(y,z) built with dense
/// matrix powers.
inline double dense_mutual_information(const Eigen::MatrixXd& p, std::uint32_t x, std::uint32_t m, std::uint32_t n) {
  Eigen::MatrixXd pm = Eigen::MatrixXd::Identity(p.rows(), p.cols());
  for (std::uint32_t i = 0; i < m; ++i) pm = pm * p;
  Eigen::MatrixXd pk = Eigen::MatrixXd::Identity(p.rows(), p.cols());
  for (std::uint32_t i = 0; i < n - m; ++i) pk = pk * p;
  const Eigen::RowVectorXd a = pm.row(x);
  const Eigen::RowVectorXd b = a * pk;
  double mi = 0.0;
  for (Eigen::Index y = 0; y < p.rows(); ++y) {
    for (Eigen::Index z = 0; z < p.rows(); ++z) {
      const double j = a(y) * pk(y, z);
      if (j > 0.0) mi += j * std::log(j / (a(y) * b(z)));
    }
  }
  return mi;
}

/// Joint law of (x_m, x_n) by enumerating every walk path of length n from x.
inline Eigen::MatrixXd enumerated_joint_law(const EdgeListGraph& g, std::uint32_t x, std::uint32_t m, std::uint32_t n) {
  const Eigen::MatrixXd p = dense_transition(g);
  Eigen::MatrixXd joint = Eigen::MatrixXd::Zero(g.n, g.n);
  std::vector<std::uint32_t> path{x};
  auto rec = [&](auto&& self, double weight) -> void {
    if (path.size() == n + 1) {
      joint(path[m], path[n]) += weight;
      return;
    }
    const auto cur = path.back();
    for (std::uint32_t y = 0; y < g.n; ++y) {
      if (p(cur, y) == 0.0) continue;
      path.push_back(y);
      self(self, weight * p(cur, y));
      path.pop_back();
    }
  };
  rec(rec, 1.0);
  return joint;
}

inline double joint_mutual_information(const Eigen::MatrixXd& joint) {
  const Eigen::VectorXd a = joint.rowwise().sum();
  const Eigen::RowVectorXd b = joint.colwise().sum();
  double mi = 0.0;
  for (Eigen::Index y = 0; y < joint.rows(); ++y) {
    for (Eigen::Index z = 0; z < joint.cols(); ++z) {
      const double j = joint(y, z);
      if (j > 0.0) mi += j * std::log(j / (a(y) * b(z)));
    }
  }
  return mi;
}

/// All-pairs distances; unreachable pairs stay at `far`.
inline std::vector<std::vector<std::uint32_t>> floyd_warshall(const EdgeListGraph& g) {
  constexpr std::uint32_t far = 1u << 30;
  std::vector<std::vector<std::uint32_t>> d(g.n, std::vector<std::uint32_t>(g.n, far));
  for (std::uint32_t v = 0; v < g.n; ++v) d[v][v] = 0;
  for (const auto& e : g.edges) d[e.u][e.v] = d[e.v][e.u] = 1;
  for (std::uint32_t k = 0; k < g.n; ++k) {
    for (std::uint32_t i = 0; i < g.n; ++i) {
      for (std::uint32_t j = 0; j < g.n; ++j) d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
    }
  }
  return d;
}

/// Closed form for triangulations of an (m)-gon with n internal vertices, multiple edges allowed
/// and loops forbidden: with p = m − 2,
///   T = 2^{n+1} (2p+1)! (2p+3n)! / (p!² n! (2p+2n+2)!).
/// Returns log T so that large entries stay finite.
inline double log_triangulation_count(std::uint32_t m, std::uint32_t n) {
  const double p = m - 2.0;
  const double k = n;
  return (k + 1) * std::log(2.0) + std::lgamma(2 * p + 2) + std::lgamma(2 * p + 3 * k + 1) - 2 * std::lgamma(p + 1) -
         std::lgamma(k + 1) - std::lgamma(2 * p + 2 * k + 3);
}

/// Σ_{n <= n_max} T(m,n) κ^n, stopping early once terms drop below 1e-18 of the running total.
inline double closed_form_partition(std::uint32_t m, double kappa, std::uint32_t n_max = 1000000) {
  double z = 0.0;
  for (std::uint32_t n = 0; n <= n_max; ++n) {
    const double term = std::exp(log_triangulation_count(m, n) + n * std::log(kappa));
    z += term;
    if (n > 10 && term < 1e-18 * z) break;
  }
  return z;
}

/// Euclidean Delaunay edges by brute force: a triangle is Delaunay when no other point lies
/// strictly inside its circumcircle, and the edge set is the union of their sides.
inline std::set<std::pair<std::uint32_t, std::uint32_t>> brute_force_delaunay_edges(
    const std::vector<Eigen::Vector2d>& pts) {
  std::set<std::pair<std::uint32_t, std::uint32_t>> edges;
  const auto n = static_cast<std::uint32_t>(pts.size());
  for (std::uint32_t i = 0; i < n; ++i) {
    for (std::uint32_t j = i + 1; j < n; ++j) {
      for (std::uint32_t k = j + 1; k < n; ++k) {
        const Eigen::Vector2d a = pts[i], b = pts[j], c = pts[k];
        const double d = 2 * (a.x() * (b.y() - c.y()) + b.x() * (c.y() - a.y()) + c.x() * (a.y() - b.y()));
        if (std::abs(d) < 1e-12) continue;
        const double ux = (a.squaredNorm() * (b.y() - c.y()) + b.squaredNorm() * (c.y() - a.y()) +
                           c.squaredNorm() * (a.y() - b.y())) / d;
        const double uy = (a.squaredNorm() * (c.x() - b.x()) + b.squaredNorm() * (a.x() - c.x()) +
                           c.squaredNorm() * (b.x() - a.x())) / d;
        const Eigen::Vector2d centre(ux, uy);
        const double r2 = (a - centre).squaredNorm();
        bool empty = true;
        for (std::uint32_t l = 0; l < n && empty; ++l) {
          if (l != i && l != j && l != k && (pts[l] - centre).squaredNorm() < r2 * (1 - 1e-12)) empty = false;
        }
        if (!empty) continue;
        edges.insert({i, j});
        edges.insert({i, k});
        edges.insert({j, k});
      }
    }
  }
  return edges;
}

}  // namespace statlab::testing
