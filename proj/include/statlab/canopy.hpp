#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "statlab/growth.hpp"
#include "statlab/kernel.hpp"
#include "statlab/rng.hpp"

namespace statlab {

/// Branching sequence a_1, a_2, ... of a canopy tree: an explicit prefix followed by a tail rule.
struct CanopySpec {
  enum class Tail { constant, linear, periodic };

  std::vector<std::uint32_t> prefix;
  Tail tail = Tail::constant;
  /// Value of a_k past the prefix for the constant rule.
  std::uint32_t constant = 2;
  /// Repeating block past the prefix for the periodic rule.
  std::vector<std::uint32_t> period;

  static CanopySpec constant_tail(std::uint32_t c) { return {{}, Tail::constant, c, {}}; }
  static CanopySpec linear_tail() { return {{}, Tail::linear, 0, {}}; }

  /// a_k for k >= 1; under the linear rule a_k = k.
  [[nodiscard]] std::uint32_t a(std::uint64_t k) const;
  /// Throws UsageError on zero entries or an empty period.
  void validate() const;
  /// True when Σ 1/(a_1···a_k) converges.
  [[nodiscard]] bool admissible() const;
  [[nodiscard]] std::string to_string() const;
};

/// Law of the root level truncated at `level_cap`.
struct CanopyRootLaw {
  std::vector<double> probs;  // probs[k] = P(level k), k = 0..level_cap
  double truncated_mass = 0.0;
  double normalizer = 0.0;  // S

  [[nodiscard]] SparseDistribution as_distribution() const;
};

/// p_0 = 1/S, p_k = (a_k+1)/(S a_1···a_k) with S = 1 + Σ_k (a_k+1)/(a_1···a_k).
/// Throws InadmissibleError when S diverges.
[[nodiscard]] CanopyRootLaw canopy_root_distribution(const CanopySpec& spec, std::uint32_t level_cap);

/// One step of the level process of the walk: 0 -> 1; k -> k+1 with probability 1/(a_k+1), else k-1.
[[nodiscard]] std::uint32_t canopy_level_chain_step(const CanopySpec& spec, std::uint32_t k, Stream& rng);

/// Samples a level from the untruncated root law.
[[nodiscard]] std::uint32_t sample_canopy_level(const CanopySpec& spec, Stream& rng);

/// Finite tree T_depth with per-vertex levels. Vertex 0 is the root; the top vertex is frontier.
struct CanopyGraph {
  RootedMultigraph graph;
  std::vector<std::uint32_t> levels;
};

/// Builds T_depth rooted at a vertex of level `root_level` (0 <= root_level <= depth).
[[nodiscard]] CanopyGraph build_canopy(const CanopySpec& spec, std::uint32_t depth, std::uint32_t root_level);
/// Builds T_depth rooted at a level drawn from the root law conditioned on level <= depth.
[[nodiscard]] CanopyGraph build_canopy(const CanopySpec& spec, std::uint32_t depth, Stream& rng);

/// Lazy explorer of the infinite canopy tree.
class CanopyGrower final : public Grower {
 public:
  CanopyGrower(CanopySpec spec, std::uint32_t root_level);

  bool expand(RootedMultigraph& g, VertexId v) override;
  [[nodiscard]] bool tree_like() const noexcept override { return true; }
  [[nodiscard]] std::uint32_t level(VertexId v) const { return levels_.at(index_of(v)); }

 private:
  CanopySpec spec_;
  std::vector<std::uint32_t> levels_;
  std::vector<std::uint8_t> has_parent_;
  std::vector<std::uint32_t> children_;
};

/// Canopy replica rooted at the given level, or at a level drawn from the root law.
[[nodiscard]] Replica make_canopy_replica(const CanopySpec& spec, Stream& rng,
                                          std::optional<std::uint32_t> root_level = std::nullopt);

}  // namespace statlab
