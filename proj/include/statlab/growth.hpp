#pragma once

#include <cstdint>
#include <memory>

#include "statlab/graph.hpp"

namespace statlab {

/// Grow-on-demand callback for lazily generated graphs.
class Grower {
 public:
  virtual ~Grower() = default;

  /// Generates every edge of frontier vertex v and clears its frontier flag.
  /// Returns false when the ensemble cannot grow at v (a finite window, say).
  virtual bool expand(RootedMultigraph& g, VertexId v) = 0;

  /// True when explored territory is always a subtree of a tree, so that distances
  /// computed over known edges are exact.
  [[nodiscard]] virtual bool tree_like() const noexcept { return false; }
};

/// Wraps a grower and adds degree_denominator(v) loops to each vertex it explores.
class LoopifyGrower final : public Grower {
 public:
  explicit LoopifyGrower(std::unique_ptr<Grower> inner) : inner_(std::move(inner)) {}
  bool expand(RootedMultigraph& g, VertexId v) override;
  [[nodiscard]] bool tree_like() const noexcept override { return inner_->tree_like(); }
  [[nodiscard]] Grower& inner() noexcept { return *inner_; }

 private:
  std::unique_ptr<Grower> inner_;
};

/// One sampled rooted graph together with the means to grow it.
struct Replica {
  RootedMultigraph graph;
  /// Null for finite samples whose frontier can never be explored.
  std::unique_ptr<Grower> grower;
  /// True when the root law is the degree-biased (stationary) one rather than the unimodular one.
  bool degree_biased_root = false;
};

/// Explores v if it is a frontier vertex. Returns false if that is impossible.
bool ensure_explored(Replica& r, VertexId v);

/// Explores every vertex at distance < radius from x. Returns false if some such vertex
/// cannot be explored. Afterwards distances up to `radius` from x are exact.
bool ensure_ball(Replica& r, VertexId x, std::uint32_t radius);

/// Exact distance from u to v, growing the graph as far as needed.
/// Throws FrontierError if the graph cannot grow far enough.
[[nodiscard]] std::uint32_t distance_with_growth(Replica& r, VertexId u, VertexId v);

}  // namespace statlab
