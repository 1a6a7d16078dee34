#include "statlab/agw.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "statlab/errors.hpp"
#include "statlab/format.hpp"

namespace statlab {

OffspringDistribution::OffspringDistribution(std::vector<std::pair<std::uint32_t, double>> probs)
    : probs_(std::move(probs)) {
  if (probs_.empty()) throw UsageError("offspring distribution is empty");
  std::sort(probs_.begin(), probs_.end());
  double total = 0.0;
  for (std::size_t i = 0; i < probs_.size(); ++i) {
    const auto [k, p] = probs_[i];
    if (k == 0) throw UsageError("offspring distribution must have p_0 = 0");
    if (i > 0 && probs_[i - 1].first == k) throw UsageError("offspring value listed twice");
    if (!(p >= 0.0)) throw UsageError("negative offspring probability");
    total += p;
    cdf_.push_back(total);
  }
  if (std::fabs(total - 1.0) > 1e-12) throw UsageError("offspring probabilities must sum to 1");
}

OffspringDistribution OffspringDistribution::parse(std::string_view text) {
  std::vector<std::pair<std::uint32_t, double>> probs;
  while (!text.empty()) {
    const auto comma = text.find(',');
    const auto item = text.substr(0, comma);
    const auto colon = item.find(':');
    if (colon == std::string_view::npos) throw UsageError("offspring entry must read k:p");
    std::uint32_t k = 0;
    const auto ks = item.substr(0, colon);
    if (std::from_chars(ks.data(), ks.data() + ks.size(), k).ec != std::errc{}) {
      throw UsageError("bad offspring value");
    }
    double p = 0.0;
    try {
      p = std::stod(std::string(item.substr(colon + 1)));
    } catch (const std::exception&) {
      throw UsageError("bad offspring probability");
    }
    probs.emplace_back(k, p);
    text = comma == std::string_view::npos ? std::string_view{} : text.substr(comma + 1);
  }
  return OffspringDistribution(std::move(probs));
}

double OffspringDistribution::mean() const {
  double m = 0.0;
  for (const auto& [k, p] : probs_) m += k * p;
  return m;
}

std::uint32_t OffspringDistribution::max_offspring() const { return probs_.back().first; }

std::uint32_t OffspringDistribution::sample(Stream& rng) const {
  if (probs_.size() == 1) return probs_.front().first;
  const double u = rng.uniform() * cdf_.back();
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  const auto i = std::min<std::size_t>(static_cast<std::size_t>(it - cdf_.begin()), probs_.size() - 1);
  return probs_[i].first;
}

std::string OffspringDistribution::to_string() const {
  std::string out;
  for (const auto& [k, p] : probs_) {
    if (!out.empty()) out += ',';
    out += std::to_string(k) + ':' + format_real(p);
  }
  return out;
}

double agw_speed_formula(const OffspringDistribution& offspring) {
  double ell = 0.0;
  for (const auto& [k, p] : offspring.probs()) ell += p * (static_cast<double>(k) - 1.0) / (static_cast<double>(k) + 1.0);
  return ell;
}

AgwGrower::AgwGrower(OffspringDistribution offspring, Stream rng)
    : offspring_(std::move(offspring)), rng_(rng), parent_{VertexId{1}, VertexId{0}}, children_{-1, -1} {}

std::int64_t AgwGrower::offspring_count(VertexId v) const {
  return index_of(v) < children_.size() ? children_[index_of(v)] : -1;
}

bool AgwGrower::expand(RootedMultigraph& g, VertexId v) {
  if (!g.is_frontier(v)) return true;
  const std::uint32_t k = offspring_.sample(rng_);
  for (std::uint32_t i = 0; i < k; ++i) {
    const VertexId child = g.add_vertex(true);
    g.add_edge(v, child);
    parent_.push_back(v);
    children_.push_back(-1);
  }
  children_[index_of(v)] = k;
  g.set_frontier(v, false);
  return true;
}

Replica make_agw_replica(const OffspringDistribution& offspring, Stream rng) {
  Replica r;
  r.graph = RootedMultigraph(2);
  r.graph.add_edge(VertexId{0}, VertexId{1});
  r.graph.set_frontier(VertexId{0}, true);
  r.graph.set_frontier(VertexId{1}, true);
  r.grower = std::make_unique<AgwGrower>(offspring, rng);
  r.degree_biased_root = true;
  return r;
}

RootedMultigraph sample_agw(const OffspringDistribution& offspring, std::int64_t depth_cap, Stream& rng) {
  if (depth_cap <= 0) throw UsageError("depth cap must be positive");
  Replica r = make_agw_replica(offspring, rng.split(rng()));
  ensure_ball(r, r.graph.root(), static_cast<std::uint32_t>(depth_cap));
  return std::move(r.graph);
}

}  // namespace statlab
