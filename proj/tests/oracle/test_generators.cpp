#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "oracles.hpp"
#include "statlab/agw.hpp"
#include "statlab/bridge_tree.hpp"
#include "statlab/canopy.hpp"
#include "statlab/delaunay.hpp"
#include "statlab/ensemble.hpp"
#include "statlab/errors.hpp"
#include "statlab/peeling.hpp"

namespace statlab {
namespace {

// ---- augmented Galton-Watson ----

TEST(Agw, SpeedFormulaExamples) {
  EXPECT_DOUBLE_EQ(agw_speed_formula(OffspringDistribution({{1, 1.0}})), 0.0);
  EXPECT_DOUBLE_EQ(agw_speed_formula(OffspringDistribution({{2, 1.0}})), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(agw_speed_formula(OffspringDistribution({{3, 1.0}})), 0.5);
  EXPECT_NEAR(agw_speed_formula(OffspringDistribution({{2, 0.5}, {3, 0.5}})), 5.0 / 12.0, 1e-15);
}

TEST(Agw, OffspringValidation) {
  EXPECT_THROW(OffspringDistribution({{0, 1.0}}), UsageError);
  EXPECT_THROW(OffspringDistribution({{2, 0.7}}), UsageError);
  EXPECT_THROW((void)OffspringDistribution::parse("2:x"), UsageError);
  const auto d = OffspringDistribution::parse("2:0.25,3:0.75");
  EXPECT_DOUBLE_EQ(d.mean(), 2.75);
  EXPECT_EQ(OffspringDistribution::parse(d.to_string()).probs(), d.probs());
}

TEST(Agw, LineCapFiveHasElevenVertices) {
  Stream rng(1);
  const auto g = sample_agw(OffspringDistribution({{1, 1.0}}), 5, rng);
  EXPECT_EQ(g.vertex_count(), 11u);
  const auto d = distances_within(g, g.root(), 10, FrontierPolicy::known_edges);
  std::uint32_t far = 0;
  for (auto x : d) far = std::max(far, x);
  EXPECT_EQ(far, 5u);
}

TEST(Agw, BinaryTreeIsThreeRegular) {
  Stream rng(2);
  const auto g = sample_agw(OffspringDistribution({{2, 1.0}}), 6, rng);
  for (std::size_t v = 0; v < g.vertex_count(); ++v) {
    if (!g.is_frontier(vertex_at(v))) {
      EXPECT_EQ(g.degree_denominator(vertex_at(v)), 3u);
    }
  }
}

TEST(Agw, NonPositiveCapRejected) {
  Stream rng(3);
  EXPECT_THROW((void)sample_agw(OffspringDistribution({{2, 1.0}}), 0, rng), UsageError);
}

TEST(Agw, MeanOffspringMatchesLaw) {
  auto r = make_agw_replica(OffspringDistribution({{2, 0.5}, {3, 0.5}}), Stream(4));
  ASSERT_TRUE(ensure_ball(r, r.graph.root(), 9));
  const auto& grower = dynamic_cast<const AgwGrower&>(*r.grower);
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t v = 0; v < r.graph.vertex_count(); ++v) {
    const auto c = grower.offspring_count(vertex_at(v));
    if (c < 0) continue;
    sum += static_cast<double>(c);
    ++count;
  }
  ASSERT_GT(count, 1000u);
  EXPECT_LE(std::abs(sum / count - 2.5), 3 * 0.5 / std::sqrt(count));
}

// ---- canopy ----

TEST(Canopy, RootLawClosedFormForBinary) {
  const auto law = canopy_root_distribution(CanopySpec::constant_tail(2), 60);
  EXPECT_NEAR(law.probs[0], 0.25, 1e-12);
  for (std::uint32_t n = 1; n <= 60; ++n) EXPECT_NEAR(law.probs[n], 3.0 / std::ldexp(1.0, n + 2), 1e-12);
  EXPECT_NEAR(law.normalizer, 4.0, 1e-12);
}

TEST(Canopy, ConstantOneIsInadmissible) {
  EXPECT_FALSE(CanopySpec::constant_tail(1).admissible());
  EXPECT_THROW((void)canopy_root_distribution(CanopySpec::constant_tail(1), 20), InadmissibleError);
}

TEST(Canopy, LinearTailNormalizerIsTwoE) {
  // S = 1 + Σ (k+1)/k! = 2e.
  const auto law = canopy_root_distribution(CanopySpec::linear_tail(), 40);
  EXPECT_NEAR(law.normalizer, 2 * std::numbers::e, 1e-12);
  EXPECT_NEAR(law.probs[0], 1 / (2 * std::numbers::e), 1e-12);
}

TEST(Canopy, RootLawIsStationaryForLevelChain) {
  for (const auto& spec : {CanopySpec::constant_tail(2), CanopySpec::constant_tail(5), CanopySpec::linear_tail()}) {
    const std::uint32_t cap = 40;
    const auto law = canopy_root_distribution(spec, cap);
    std::vector<double> next(cap + 1, 0.0);
    for (std::uint32_t k = 0; k < cap; ++k) {
      if (k == 0) {
        next[1] += law.probs[0];
        continue;
      }
      const double up = 1.0 / (spec.a(k) + 1.0);
      next[k + 1] += law.probs[k] * up;
      next[k - 1] += law.probs[k] * (1 - up);
    }
    // The top level's outflow is missing from `next`; compare below the cap only.
    for (std::uint32_t k = 0; k + 1 < cap; ++k) EXPECT_NEAR(next[k], law.probs[k], 1e-10) << spec.to_string();
  }
}

TEST(Canopy, LevelChainUpProbability) {
  const auto spec = CanopySpec::constant_tail(2);
  Stream rng(5);
  EXPECT_EQ(canopy_level_chain_step(spec, 0, rng), 1u);
  constexpr int trials = 60000;
  int up = 0;
  for (int i = 0; i < trials; ++i) up += canopy_level_chain_step(spec, 3, rng) == 4;
  EXPECT_LE(std::abs(up - trials / 3.0), 3 * std::sqrt(trials * (1.0 / 3) * (2.0 / 3)));
}

TEST(Canopy, FiniteTreeSizesAndDegrees) {
  const auto spec = CanopySpec::linear_tail();
  std::uint64_t size = 1;
  for (std::uint32_t depth = 1; depth <= 6; ++depth) {
    size = spec.a(depth) * size + 1;
    const auto t = build_canopy(spec, depth, 0);
    ASSERT_EQ(t.graph.vertex_count(), size);
    for (std::size_t v = 0; v < t.graph.vertex_count(); ++v) {
      const auto level = t.levels[v];
      const auto deg = t.graph.degree_denominator(vertex_at(v));
      if (level == depth) {
        EXPECT_TRUE(t.graph.is_frontier(vertex_at(v)));
        EXPECT_EQ(deg, spec.a(depth));
      } else {
        EXPECT_EQ(deg, level == 0 ? 1u : spec.a(level) + 1);
      }
    }
  }
}

TEST(Canopy, LazyExplorerMatchesFiniteTree) {
  const auto spec = CanopySpec::constant_tail(3);
  Stream rng(6);
  auto lazy = make_canopy_replica(spec, rng, 0);
  ASSERT_TRUE(ensure_ball(lazy, lazy.graph.root(), 7));
  const auto built = build_canopy(spec, 9, 0);
  EXPECT_EQ(ball_profile(lazy.graph, 7).sizes, ball_profile(built.graph, 7).sizes);
}

TEST(Canopy, LinearTailBallsGrowFactorially) {
  Stream rng(7);
  auto r = make_canopy_replica(CanopySpec::linear_tail(), rng, 0);
  ASSERT_TRUE(ensure_ball(r, r.graph.root(), 8));
  EXPECT_GE(ball_profile(r.graph, 8).sizes[8], 24u);
}

// ---- bridged ternary tree ----

TEST(BridgeTree, AddressPushPop) {
  TreeAddress a;
  a.push(2);
  a.push(1);
  a.push(1);
  a.push(1);
  EXPECT_EQ(a.depth(), 4u);
  EXPECT_EQ(a.step(0), 2u);
  EXPECT_EQ(a.index_at_parent(), 2u);  // child 1 sits behind the parent edge
  TreeAddress b = a;
  b.pop();
  b.push(1);
  EXPECT_TRUE(a == b);
  EXPECT_EQ(a.hash(), b.hash());
  b.pop();
  b.push(0);
  EXPECT_EQ(a.common_prefix(b), 3u);
}

TEST(BridgeTree, CoreSampleInvariants) {
  Stream rng(8);
  auto r = sample_bridge_tree(3, 200'000'000, rng);
  const auto& grower = dynamic_cast<const BridgeTreeGrower&>(*r.grower);
  ASSERT_FALSE(grower.bridges().empty());
  std::vector<int> emitted(r.graph.vertex_count(), 0);
  for (const auto& b : grower.bridges()) {
    EXPECT_EQ(grower.labels().path_sum(grower.address(b.source), grower.address(b.target)), 0);
    ++emitted[index_of(b.source)];
  }
  std::size_t explored = 0;
  for (std::size_t v = 0; v < r.graph.vertex_count(); ++v) {
    if (r.graph.is_frontier(vertex_at(v))) continue;
    ++explored;
    EXPECT_EQ(r.graph.degree_denominator(vertex_at(v)), 9u);
    EXPECT_EQ(r.graph.loop_count(vertex_at(v)), 0u);
    EXPECT_EQ(emitted[v], 3) << v;
  }
  EXPECT_GE(explored, 1u + 3 + 6 + 12);
}

TEST(BridgeTree, LabelsAreFair) {
  std::int64_t plus = 0;
  std::int64_t total = 0;
  for (std::uint64_t s = 0; total < 10000; ++s) {
    Stream rng(100 + s);
    Replica r;
    try {
      r = sample_bridge_tree(3, 200'000'000, rng);
    } catch (const BudgetError&) {
      continue;
    }
    for (int l : dynamic_cast<const BridgeTreeGrower&>(*r.grower).tree_edge_labels()) {
      plus += l > 0;
      ++total;
    }
  }
  EXPECT_LE(std::abs(plus - total / 2.0), 3 * std::sqrt(total * 0.25));
}

// ---- peeling ----

TEST(Peeling, AlphaClosedForms) {
  EXPECT_NEAR(alpha_from_kappa(kappa_critical), 2.0 / 3.0, 1e-10);
  // α = (1+√5)/4 solves α²(1−α) = 1/8 exactly.
  EXPECT_NEAR(alpha_from_kappa(1.0 / 16.0), (1 + std::sqrt(5.0)) / 4, 1e-10);
  EXPECT_GT(alpha_from_kappa(1e-9), 0.9999);
  EXPECT_THROW((void)alpha_from_kappa(0.08), UsageError);
  EXPECT_THROW((void)alpha_from_kappa(0.0), UsageError);
}

TEST(Peeling, TableMatchesClosedForm) {
  const BoltzmannTable t(1.0, 14, 14);
  // Catalan numbers without internal vertices, A000309 on the 2-gon.
  const double catalan[] = {1, 1, 2, 5, 14, 42, 132, 429};
  for (std::uint32_t m = 2; m < 10; ++m) EXPECT_DOUBLE_EQ(t.weight(m, 0), catalan[m - 2]);
  const double a000309[] = {1, 1, 4, 24, 176, 1456, 13056};
  for (std::uint32_t n = 0; n < 7; ++n) EXPECT_DOUBLE_EQ(t.weight(2, n), a000309[n]);
  for (std::uint32_t m = 2; m <= 14; ++m) {
    for (std::uint32_t n = 0; n <= 14; ++n) {
      EXPECT_NEAR(std::log(t.weight(m, n)), testing::log_triangulation_count(m, n), 1e-9) << m << "," << n;
    }
  }
}

TEST(Peeling, PartitionFunctionMatchesClosedForm) {
  // The table is truncated in the number of internal vertices; compare at the same truncation.
  const auto p = make_peeling_params(1.0 / 16.0);
  for (std::uint32_t m = 2; m < 12; ++m) {
    const auto n_max = static_cast<std::uint32_t>(p.volume_cdf[m].size() - 1);
    EXPECT_NEAR(p.z_table[m] / testing::closed_form_partition(m, 1.0 / 16.0, n_max), 1.0, 1e-12) << m;
    EXPECT_LE(p.z_table[m], testing::closed_form_partition(m, 1.0 / 16.0));
  }
}

TEST(Peeling, IncrementLawIsNormalized) {
  const auto p = make_peeling_params(1.0 / 16.0);
  EXPECT_NO_THROW(p.validate());
  double mass = p.alpha;
  for (std::uint32_t i = 1; i <= p.max_down(); ++i) mass += p.q_down(i);
  EXPECT_NEAR(mass, 1.0, std::max(std::abs(p.truncation_error), 1e-12));
  double vmass = 0.0;
  for (std::uint32_t k = 0; k < 4000; ++k) vmass += p.volume_increment_probability(k);
  EXPECT_NEAR(vmass, 1.0, 1e-8);
}

TEST(Peeling, StepSupport) {
  const auto p = make_peeling_params(1.0 / 16.0);
  Stream rng(9);
  for (int i = 0; i < 20000; ++i) {
    const auto s = sample_chain_step(p, rng);
    if (s.dx == 1) {
      EXPECT_EQ(s.dy, 1);
    } else {
      EXPECT_LE(s.dx, -1);
      EXPECT_GE(s.dy, 0);
    }
  }
}

TEST(Peeling, ChainPathRespectsConditioning) {
  const auto p = make_peeling_params(1.0 / 16.0);
  Stream rng(10);
  const auto path = sample_perimeter_volume_chain(p, 500, rng);
  ASSERT_EQ(path.perimeter.size(), 501u);
  EXPECT_EQ(path.perimeter.front(), 2);
  EXPECT_EQ(path.volume.front(), 2);
  for (std::size_t t = 0; t < path.perimeter.size(); ++t) {
    EXPECT_GE(path.perimeter[t], 2);
    if (t > 0) {
      EXPECT_GE(path.volume[t], path.volume[t - 1]);
    }
  }
  EXPECT_GT(path.acceptance_rate, 0.0);
  EXPECT_LE(path.acceptance_rate, 1.0);
}

TEST(Peeling, VolumeTailDominatedGeometrically) {
  // T(m,k) κ'^k <= Z_m(κ') gives P(ΔY = k) <= C (κ/κ')^k with C = Σ_i q_{−i} Z_{i+1}(κ')/Z_{i+1}(κ).
  const double kappa = 1.0 / 16.0;
  const double kprime = (kappa + kappa_critical) / 2;
  const auto p = make_peeling_params(kappa);
  double c = 0.0;
  for (std::uint32_t i = 1; i <= p.max_down(); ++i) {
    c += p.q_down(i) * testing::closed_form_partition(i + 1, kprime) / testing::closed_form_partition(i + 1, kappa);
  }
  for (std::uint32_t k = 2; k <= 20; ++k) {
    EXPECT_LE(p.volume_increment_probability(k), c * std::pow(kappa / kprime, k) * (1 + 1e-9)) << k;
  }
  // Empirical frequencies against the bare geometric bound.
  constexpr int draws = 100000;
  std::vector<int> counts(21, 0);
  Stream rng(11);
  for (int i = 0; i < draws; ++i) {
    const auto s = sample_chain_step(p, rng);
    if (s.dy <= 20) ++counts[static_cast<std::size_t>(s.dy)];
  }
  for (std::uint32_t k = 1; k <= 20; ++k) {
    const double bound = std::pow(kappa / kprime, k);
    EXPECT_LE(counts[k] / static_cast<double>(draws), bound + 3 * std::sqrt(bound * (1 - bound) / draws)) << k;
  }
}

// ---- Poisson-Delaunay ----

TEST(Delaunay, WindowAreas) {
  EXPECT_NEAR(window_area(Geometry::euclidean_2d, 10), 100 * std::numbers::pi, 1e-9);
  EXPECT_NEAR(window_area(Geometry::hyperbolic_2d, 5), 2 * std::numbers::pi * (std::cosh(5.0) - 1), 1e-9);
}

TEST(Delaunay, TriangleGivesK3) {
  PointSample s;
  s.points = {{1.0, 0.0}, {0.0, 1.0}, {0.0, 0.0}};
  s.target_radius = 10;
  s.window_radius = 11;
  s.includes_origin = true;
  const auto d = delaunay_rooted_graph(s);
  ASSERT_EQ(d.graph.vertex_count(), 3u);
  for (std::uint32_t a = 0; a < 3; ++a) {
    for (std::uint32_t b = a + 1; b < 3; ++b) EXPECT_EQ(d.graph.edge_count(vertex_at(a), vertex_at(b)), 1u);
  }
  EXPECT_EQ(d.point_of_vertex[0], 2u);
}

TEST(Delaunay, MatchesBruteForceCircumcircles) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Stream rng(200 + seed);
    const auto s = sample_poisson_points(Geometry::euclidean_2d, 3.0, 1.0, rng);
    ASSERT_LE(s.points.size(), 120u);
    const auto tri = delaunay_triangulation(s.points);
    std::set<std::pair<std::uint32_t, std::uint32_t>> edges;
    for (const auto& t : tri.triangles) {
      for (int e = 0; e < 3; ++e) {
        auto a = t[e], b = t[(e + 1) % 3];
        edges.insert({std::min(a, b), std::max(a, b)});
      }
    }
    EXPECT_EQ(edges, testing::brute_force_delaunay_edges(s.points)) << seed;
    for (const auto& [a, b] : edges) EXPECT_TRUE(empty_disk_exists(s.points, a, b, s.model));
  }
}

TEST(Delaunay, RootedGraphEdgesPassEmptyDisk) {
  for (auto model : {Geometry::euclidean_2d, Geometry::hyperbolic_2d}) {
    Stream rng(300);
    const auto s = model == Geometry::euclidean_2d ? sample_poisson_points(model, 5.0, 1.5, rng)
                                                   : sample_poisson_points(model, 2.5, 1.3, rng);
    const auto d = delaunay_rooted_graph(s);
    EXPECT_EQ(s.points[d.point_of_vertex[0]], Eigen::Vector2d(0, 0));
    std::size_t edges = 0;
    for (std::size_t v = 0; v < d.graph.vertex_count(); ++v) {
      for (const auto& inc : d.graph.neighbors(vertex_at(v))) {
        if (index_of(inc.neighbor) <= v) continue;
        ++edges;
        EXPECT_TRUE(empty_disk_exists(s.points, d.point_of_vertex[v], d.point_of_vertex[index_of(inc.neighbor)], model));
      }
    }
    EXPECT_GT(edges, 10u);
  }
}

TEST(Delaunay, PoissonCountsMatchArea) {
  struct Case {
    Geometry model;
    double target, margin;
  };
  for (const auto& c : {Case{Geometry::euclidean_2d, 8, 2}, Case{Geometry::hyperbolic_2d, 4, 1}}) {
    const double area = window_area(c.model, c.target + c.margin);
    constexpr int samples = 200;
    double sum = 0.0;
    Stream rng(400);
    for (int i = 0; i < samples; ++i) {
      const auto s = sample_poisson_points(c.model, c.target, c.margin, rng);
      sum += static_cast<double>(s.points.size() - 1);
      for (std::size_t k = 0; k + 1 < s.points.size(); ++k) ASSERT_LE(radius_of(c.model, s.points[k]), c.target + c.margin);
    }
    EXPECT_LE(std::abs(sum / samples - area), 3 * std::sqrt(area / samples)) << geometry_name(c.model);
  }
}

TEST(Delaunay, EuclideanMeanDegreeIsSix) {
  double sum = 0.0;
  constexpr int samples = 100;
  for (int i = 0; i < samples; ++i) {
    Stream rng(500 + i);
    const auto d = delaunay_rooted_graph(sample_poisson_points(Geometry::euclidean_2d, 30, 8, rng));
    sum += static_cast<double>(d.graph.degree_denominator(d.graph.root()));
  }
  EXPECT_NEAR(sum / samples, 6.0, 0.3);
}

// ---- configuration ----

TEST(Ensemble, ParseAndEchoRoundTrip) {
  const auto c = EnsembleConfig::parse("# comment\nensemble=agw\noffspring=2:0.5,3:0.5\nloopify=true\nseed=7\n");
  EXPECT_EQ(c.name(), "agw");
  EXPECT_TRUE(c.loopify());
  EXPECT_EQ(c.seed(), 7u);
  const auto again = EnsembleConfig::from_entries(c.entries());
  EXPECT_EQ(again.echo(), c.echo());
  EXPECT_THROW((void)EnsembleConfig::parse("ensemble=nope\n"), UsageError);
  EXPECT_THROW((void)EnsembleConfig::parse("ensemble=agw\nbogus=1\n"), UsageError);
  EXPECT_NE(c.with({{"offspring", "3:1"}}).echo().find("offspring=3:1"), std::string::npos);
  // Keys of the old ensemble do not carry over to a different one.
  EXPECT_THROW((void)c.with({{"ensemble", "delaunay_h2"}}), UsageError);
}

}  // namespace
}  // namespace statlab
