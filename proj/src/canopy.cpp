#include "statlab/canopy.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "statlab/errors.hpp"

namespace statlab {

std::uint32_t CanopySpec::a(std::uint64_t k) const {
  if (k == 0) throw UsageError("canopy sequence starts at a_1");
  if (k <= prefix.size()) return prefix[k - 1];
  switch (tail) {
    case Tail::constant:
      return constant;
    case Tail::linear:
      return static_cast<std::uint32_t>(std::min<std::uint64_t>(k, 0xffffffffu));
    case Tail::periodic:
      return period[(k - prefix.size() - 1) % period.size()];
  }
  return constant;
}

void CanopySpec::validate() const {
  if (std::any_of(prefix.begin(), prefix.end(), [](auto x) { return x == 0; })) {
    throw UsageError("canopy prefix entries must be >= 1");
  }
  if (tail == Tail::constant && constant == 0) throw UsageError("canopy constant tail must be >= 1");
  if (tail == Tail::periodic) {
    if (period.empty()) throw UsageError("canopy periodic tail needs a non-empty block");
    if (std::any_of(period.begin(), period.end(), [](auto x) { return x == 0; })) {
      throw UsageError("canopy period entries must be >= 1");
    }
  }
}

bool CanopySpec::admissible() const {
  validate();
  switch (tail) {
    case Tail::constant:
      return constant >= 2;
    case Tail::linear:
      return true;
    case Tail::periodic:
      return std::any_of(period.begin(), period.end(), [](auto x) { return x >= 2; });
  }
  return false;
}

std::string CanopySpec::to_string() const {
  auto join = [](const std::vector<std::uint32_t>& xs) {
    std::string s;
    for (auto x : xs) {
      if (!s.empty()) s += ':';
      s += std::to_string(x);
    }
    return s;
  };
  std::string out = "prefix=" + join(prefix) + ";tail=";
  switch (tail) {
    case Tail::constant:
      out += "constant:" + std::to_string(constant);
      break;
    case Tail::linear:
      out += "linear";
      break;
    case Tail::periodic:
      out += "periodic:" + join(period);
      break;
  }
  return out;
}

namespace {

// Unnormalized weights t_0 = 1, t_k = (a_k+1)/(a_1···a_k), summed until the remaining tail
// is below double resolution. Returns S and fills weights up to `keep`.
double canopy_weights(const CanopySpec& spec, std::uint32_t keep, std::vector<double>& weights, double& tail_sum) {
  if (!spec.admissible()) {
    throw InadmissibleError("canopy sequence " + spec.to_string() + " has divergent normalizer; no stationary root");
  }
  weights.assign(static_cast<std::size_t>(keep) + 1, 0.0);
  weights[0] = 1.0;
  double s = 1.0;
  tail_sum = 0.0;
  double inv_product = 1.0;
  // The prefix and one period bound the start of geometric decay.
  const std::uint64_t min_terms =
      std::max<std::uint64_t>(keep, spec.prefix.size() + spec.period.size()) + 1;
  for (std::uint64_t k = 1;; ++k) {
    const double a = spec.a(k);
    inv_product /= a;
    const double t = (a + 1.0) * inv_product;
    if (k <= keep) {
      weights[k] = t;
    } else {
      tail_sum += t;
    }
    s += t;
    if (k >= min_terms && (t < 1e-18 * s || inv_product == 0.0)) break;
    if (k > 100'000'000) throw InadmissibleError("canopy normalizer did not converge");
  }
  return s;
}

}  // namespace

SparseDistribution CanopyRootLaw::as_distribution() const {
  Eigen::SparseVector<double> v(static_cast<Eigen::Index>(probs.size()));
  for (std::size_t k = 0; k < probs.size(); ++k) {
    if (probs[k] >= SparseDistribution::prune_threshold) v.insertBack(static_cast<Eigen::Index>(k)) = probs[k];
  }
  return SparseDistribution(std::move(v));
}

CanopyRootLaw canopy_root_distribution(const CanopySpec& spec, std::uint32_t level_cap) {
  CanopyRootLaw law;
  double tail = 0.0;
  law.normalizer = canopy_weights(spec, level_cap, law.probs, tail);
  for (auto& p : law.probs) p /= law.normalizer;
  law.truncated_mass = tail / law.normalizer;
  return law;
}

std::uint32_t canopy_level_chain_step(const CanopySpec& spec, std::uint32_t k, Stream& rng) {
  if (k == 0) return 1;
  return rng.bernoulli(1.0 / (spec.a(k) + 1.0)) ? k + 1 : k - 1;
}

std::uint32_t sample_canopy_level(const CanopySpec& spec, Stream& rng) {
  std::vector<double> weights;
  double tail = 0.0;
  const double s = canopy_weights(spec, 0, weights, tail);
  double u = rng.uniform() * s;
  if (u < 1.0) return 0;
  u -= 1.0;
  double inv_product = 1.0;
  for (std::uint32_t k = 1;; ++k) {
    const double a = spec.a(k);
    inv_product /= a;
    const double t = (a + 1.0) * inv_product;
    if (u < t || t == 0.0) return k;
    u -= t;
  }
}

CanopyGraph build_canopy(const CanopySpec& spec, std::uint32_t depth, std::uint32_t root_level) {
  spec.validate();
  if (depth < 1) throw UsageError("canopy depth must be >= 1");
  if (root_level > depth) throw UsageError("root level above the top of T_depth");
  // Build T_depth top-down with provisional ids, then relabel breadth-first from the root.
  std::vector<std::uint32_t> level{depth};
  std::vector<std::int64_t> parent{-1};
  std::vector<std::vector<std::uint32_t>> children(1);
  for (std::size_t i = 0; i < level.size(); ++i) {
    if (level[i] == 0) continue;
    const std::uint32_t a = spec.a(level[i]);
    for (std::uint32_t c = 0; c < a; ++c) {
      const auto id = static_cast<std::uint32_t>(level.size());
      level.push_back(level[i] - 1);
      parent.push_back(static_cast<std::int64_t>(i));
      children.emplace_back();
      children[i].push_back(id);
    }
  }
  std::uint32_t root = 0;
  while (level[root] != root_level) root = children[root].front();

  std::vector<std::int64_t> new_id(level.size(), -1);
  std::vector<std::uint32_t> order{root};
  new_id[root] = 0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto u = order[i];
    auto visit = [&](std::uint32_t w) {
      if (new_id[w] >= 0) return;
      new_id[w] = static_cast<std::int64_t>(order.size());
      order.push_back(w);
    };
    if (parent[u] >= 0) visit(static_cast<std::uint32_t>(parent[u]));
    for (auto c : children[u]) visit(c);
  }

  CanopyGraph out{RootedMultigraph(level.size()), std::vector<std::uint32_t>(level.size())};
  for (std::size_t i = 0; i < level.size(); ++i) {
    out.levels[static_cast<std::size_t>(new_id[i])] = level[i];
    if (parent[i] >= 0) {
      out.graph.add_edge(vertex_at(static_cast<std::size_t>(new_id[i])),
                         vertex_at(static_cast<std::size_t>(new_id[static_cast<std::size_t>(parent[i])])));
    }
  }
  out.graph.set_frontier(vertex_at(static_cast<std::size_t>(new_id[0])), true);
  return out;
}

CanopyGraph build_canopy(const CanopySpec& spec, std::uint32_t depth, Stream& rng) {
  const auto law = canopy_root_distribution(spec, depth);
  double total = 0.0;
  for (auto p : law.probs) total += p;
  double u = rng.uniform() * total;
  std::uint32_t level = depth;
  for (std::uint32_t k = 0; k <= depth; ++k) {
    if (u < law.probs[k]) {
      level = k;
      break;
    }
    u -= law.probs[k];
  }
  return build_canopy(spec, depth, level);
}

CanopyGrower::CanopyGrower(CanopySpec spec, std::uint32_t root_level)
    : spec_(std::move(spec)), levels_{root_level}, has_parent_{0}, children_{0} {
  spec_.validate();
}

bool CanopyGrower::expand(RootedMultigraph& g, VertexId v) {
  if (!g.is_frontier(v)) return true;
  const auto i = index_of(v);
  const std::uint32_t level = levels_[i];
  if (!has_parent_[i]) {
    const VertexId p = g.add_vertex(true);
    g.add_edge(v, p);
    levels_.push_back(level + 1);
    has_parent_.push_back(0);
    children_.push_back(1);
    has_parent_[i] = 1;
  }
  const std::uint32_t want = level == 0 ? 0 : spec_.a(level);
  while (children_[i] < want) {
    const VertexId c = g.add_vertex(true);
    g.add_edge(v, c);
    levels_.push_back(level - 1);
    has_parent_.push_back(1);
    children_.push_back(0);
    ++children_[i];
  }
  g.set_frontier(v, false);
  return true;
}

Replica make_canopy_replica(const CanopySpec& spec, Stream& rng, std::optional<std::uint32_t> root_level) {
  const std::uint32_t level = root_level ? *root_level : sample_canopy_level(spec, rng);
  Replica r;
  r.graph = RootedMultigraph(1);
  r.graph.set_frontier(r.graph.root(), true);
  r.grower = std::make_unique<CanopyGrower>(spec, level);
  r.degree_biased_root = true;
  return r;
}

}  // namespace statlab
