#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "statlab/agw.hpp"
#include "statlab/canopy.hpp"
#include "statlab/delaunay.hpp"
#include "statlab/growth.hpp"
#include "statlab/rng.hpp"

namespace statlab {

struct AgwParams {
  OffspringDistribution offspring{{{2, 1.0}}};
};

struct CanopyParams {
  CanopySpec spec = CanopySpec::constant_tail(2);
  /// Fixed root level; drawn from the root law when absent.
  std::optional<std::uint32_t> root_level;
};

struct BridgeParams {
  std::uint32_t core_radius = 3;
  std::uint64_t expansion_budget = 200'000'000;
};

struct PeelingConfig {
  double kappa = 1.0 / 16.0;
};

struct DelaunayParams {
  Geometry model = Geometry::euclidean_2d;
  double radius = 30.0;
  double margin = 8.0;
};

/// Plain-text `key=value` configuration selecting one ensemble.
///
/// Keys: ensemble (agw|canopy|bridge|peeling|delaunay_e2|delaunay_h2), seed, loopify,
/// offspring (`k:p,...`), a_prefix (`a1:a2:...`), a_tail (`c`, `constant:c`, `linear`,
/// `periodic:b1:b2:...`), root_level, core_radius, budget, kappa, radius, margin.
class EnsembleConfig {
 public:
  using Params = std::variant<AgwParams, CanopyParams, BridgeParams, PeelingConfig, DelaunayParams>;

  EnsembleConfig() = default;
  explicit EnsembleConfig(Params params, bool loopify = false) : params_(std::move(params)), loopify_(loopify) {}

  /// Parses lines of `key=value`; blank lines and `#` comments are skipped.
  static EnsembleConfig parse(std::string_view text);
  static EnsembleConfig from_entries(const std::map<std::string, std::string>& entries);
  static EnsembleConfig load(const std::string& path);

  /// Returns a copy with the given keys replaced.
  [[nodiscard]] EnsembleConfig with(const std::map<std::string, std::string>& overrides) const;

  [[nodiscard]] const Params& params() const noexcept { return params_; }
  [[nodiscard]] bool loopify() const noexcept { return loopify_; }
  [[nodiscard]] std::optional<std::uint64_t> seed() const noexcept { return seed_; }
  void set_seed(std::uint64_t seed) noexcept { seed_ = seed; }

  /// agw, canopy, bridge, peeling, delaunay_e2 or delaunay_h2.
  [[nodiscard]] std::string name() const;
  [[nodiscard]] bool is_graph_ensemble() const noexcept { return !std::holds_alternative<PeelingConfig>(params_); }

  /// Canonical entries (without the seed) from which the config can be rebuilt.
  [[nodiscard]] std::map<std::string, std::string> entries() const;
  /// Entries joined as `key=value;key=value` in key order.
  [[nodiscard]] std::string echo() const;

 private:
  Params params_ = AgwParams{};
  bool loopify_ = false;
  std::optional<std::uint64_t> seed_;
};

/// Samples one rooted graph replica from a graph ensemble.
[[nodiscard]] Replica make_replica(const EnsembleConfig& config, Stream rng);

}  // namespace statlab
