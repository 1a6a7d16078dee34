#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "statlab/growth.hpp"
#include "statlab/rng.hpp"

namespace statlab {

/// Offspring law with finite support on k >= 1.
class OffspringDistribution {
 public:
  /// Pairs (k, p_k); validates positivity of k, Σ p_k = 1 within 1e-12, and no zero offspring.
  explicit OffspringDistribution(std::vector<std::pair<std::uint32_t, double>> probs);

  /// Parses `k:p,k:p,...`.
  static OffspringDistribution parse(std::string_view text);

  [[nodiscard]] const std::vector<std::pair<std::uint32_t, double>>& probs() const noexcept { return probs_; }
  [[nodiscard]] double mean() const;
  [[nodiscard]] std::uint32_t max_offspring() const;
  [[nodiscard]] std::uint32_t sample(Stream& rng) const;
  [[nodiscard]] std::string to_string() const;

 private:
  std::vector<std::pair<std::uint32_t, double>> probs_;
  std::vector<double> cdf_;
};

/// Σ_k p_k (k−1)/(k+1).
[[nodiscard]] double agw_speed_formula(const OffspringDistribution& offspring);

/// Lazy augmented Galton-Watson tree: vertex 0 and vertex 1 are the roots of two independent
/// trees joined by an edge. Expanding a vertex samples its offspring.
class AgwGrower final : public Grower {
 public:
  AgwGrower(OffspringDistribution offspring, Stream rng);

  bool expand(RootedMultigraph& g, VertexId v) override;
  [[nodiscard]] bool tree_like() const noexcept override { return true; }

  /// Neighbour of v towards the joining edge; the two roots are each other's parent.
  [[nodiscard]] VertexId parent(VertexId v) const { return parent_.at(index_of(v)); }
  /// Number of offspring sampled at v, or -1 while v is unexplored.
  [[nodiscard]] std::int64_t offspring_count(VertexId v) const;

 private:
  OffspringDistribution offspring_;
  Stream rng_;
  std::vector<VertexId> parent_;
  std::vector<std::int64_t> children_;
};

/// Two vertices joined by an edge, both frontier, with an AGW grower attached.
[[nodiscard]] Replica make_agw_replica(const OffspringDistribution& offspring, Stream rng);

/// AGW tree explored to graph distance depth_cap from vertex 0; vertices at the cap are frontier.
[[nodiscard]] RootedMultigraph sample_agw(const OffspringDistribution& offspring, std::int64_t depth_cap, Stream& rng);

}  // namespace statlab
