#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "statlab/errors.hpp"
#include "statlab/stats.hpp"

namespace statlab {
namespace {

EnsembleConfig agw(const std::string& offspring) {
  return EnsembleConfig::parse("ensemble=agw\noffspring=" + offspring + "\n");
}

/// Law of the distance from the start after n steps of the walk on the 3-regular tree.
std::vector<double> regular_tree_distance_law(std::uint32_t n) {
  std::vector<double> law(n + 2, 0.0);
  law[0] = 1.0;
  for (std::uint32_t t = 0; t < n; ++t) {
    std::vector<double> next(n + 2, 0.0);
    for (std::uint32_t k = 0; k <= t; ++k) {
      if (law[k] == 0.0) continue;
      if (k == 0) {
        next[1] += law[0];
      } else {
        next[k + 1] += law[k] * 2.0 / 3.0;
        next[k - 1] += law[k] / 3.0;
      }
    }
    law = next;
  }
  return law;
}

/// Shannon entropy of p^n(root, ·): the law is uniform on each sphere of size 3·2^{k−1}.
double regular_tree_entropy(std::uint32_t n) {
  const auto law = regular_tree_distance_law(n);
  double h = 0.0;
  for (std::uint32_t k = 0; k < law.size(); ++k) {
    if (law[k] <= 0.0) continue;
    const double sphere = k == 0 ? 1.0 : 3.0 * std::ldexp(1.0, static_cast<int>(k) - 1);
    h -= law[k] * std::log(law[k] / sphere);
  }
  return h;
}

TEST(Stats, HorizonEstimatesOnRegularTreeMatchBirthDeathChain) {
  constexpr std::uint32_t n = 10;
  const auto est = horizon_estimates(agw("2:1"), n, 3, {1, 1});
  const auto law = regular_tree_distance_law(n);
  double mean_distance = 0.0;
  for (std::uint32_t k = 0; k < law.size(); ++k) mean_distance += k * law[k];
  EXPECT_NEAR(est.kernel_drift.value, mean_distance / n, 1e-12);
  EXPECT_NEAR(est.entropy_average.value, regular_tree_entropy(n) / n, 1e-12);
  EXPECT_NEAR(est.entropy_increment.value, regular_tree_entropy(n) - regular_tree_entropy(n - 1), 1e-12);
  EXPECT_NEAR(est.growth.value, std::log(1 + 3 * (std::ldexp(1.0, n) - 1)) / n, 1e-12);
  EXPECT_NEAR(est.kernel_drift.std_error, 0.0, 1e-12);
  EXPECT_GE(est.min_cv_margin, 0.0);
  EXPECT_EQ(est.kernel_drift.trials, 3u);
  EXPECT_EQ(est.kernel_drift.statistic, "kernel_drift");
}

TEST(Stats, GrowthOnRegularTreeIsExact) {
  const auto r = growth_estimate(agw("2:1"), 12, 2, {2, 1});
  EXPECT_NEAR(r.value, std::log(1 + 3 * (std::ldexp(1.0, 12) - 1)) / 12, 1e-12);
  EXPECT_EQ(r.horizon, 12u);
}

TEST(Stats, CanopyGrowthBelowLogThree) {
  // |B_2n| <= 3^{2n+1} for a = 2.
  const auto r = growth_estimate(EnsembleConfig::parse("ensemble=canopy\na_tail=2\n"), 12, 40, {2, 1});
  EXPECT_LE(r.value, std::log(3.0) + 0.1);
  EXPECT_GT(r.value, 0.0);
}

TEST(Stats, DegreeBiasedGrowthWeightsByDegree) {
  // On the 3-regular tree every weight is equal, so both root laws agree exactly.
  const auto plain = growth_estimate(agw("2:1"), 8, 3, {2, 1}, false);
  const auto biased = growth_estimate(agw("2:1"), 8, 3, {2, 1}, true);
  EXPECT_DOUBLE_EQ(plain.value, biased.value);
}

TEST(Stats, GrowthExponentOfLineIsOne) {
  // |B_r| = 2r + 1 on the line: the log-log slope over [6, 12] is just below 1.
  const auto r = growth_exponent_estimate(agw("1:1"), 12, 2, {3, 1});
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int k = 6; k <= 12; ++k) {
    const double x = std::log(k), y = std::log(2.0 * k + 1);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double slope = (7 * sxy - sx * sy) / (7 * sxx - sx * sx);
  EXPECT_NEAR(r.value, slope, 1e-12);
}

TEST(Stats, EntropyOnLineIsSmall) {
  const auto r = entropy_estimate(agw("1:1"), 30, 3, {4, 1});
  EXPECT_GT(r.value, 0.0);
  EXPECT_LE(r.value, 0.15);
  EXPECT_GE(r.extras.at("min_cv_margin"), 0.0);
}

TEST(Stats, DriftOnLineIsDiffusive) {
  const auto r = drift_estimate(agw("1:1"), 400, 60, {5, 1});
  // E|S_n|/n ≈ sqrt(2/(π n)) ≈ 0.04 for the walk on Z.
  EXPECT_NEAR(r.value, std::sqrt(2.0 / (std::acos(-1.0) * 400)), 4 * r.std_error);
  EXPECT_EQ(r.rejected_fraction, 0.0);
}

TEST(Stats, DegreeSphereCorrelation) {
  EXPECT_NEAR(degree_sphere_correlation(agw("2:1"), 5, 4, {6, 1}).value, 3.0, 1e-12);
  const auto mixed = degree_sphere_correlation(agw("2:0.5,3:0.5"), 5, 40, {6, 1});
  EXPECT_GE(mixed.value, 3.0);
  EXPECT_LE(mixed.value, 4.0);
  EXPECT_GE(mixed.extras.at("mean_degree"), 3.0);
}

TEST(Stats, EuclideanDelaunayDegreeSphereBand) {
  const auto cfg = EnsembleConfig::parse("ensemble=delaunay_e2\nradius=12\nmargin=6\n");
  const auto r = degree_sphere_correlation(cfg, 5, 40, {6, 1});
  const double ratio = r.value / r.extras.at("mean_degree");
  EXPECT_GE(ratio, 0.5);
  EXPECT_LE(ratio, 2.0);
}

TEST(Stats, AdjacentTransportBalancesExactly) {
  const auto r = mass_transport_check(agw("2:0.5,3:0.5"), TransportFunction::adjacent, 50, {7, 1});
  EXPECT_DOUBLE_EQ(r.value, 0.0);
  EXPECT_DOUBLE_EQ(r.extras.at("send"), r.extras.at("receive"));
  EXPECT_EQ(parse_transport_function("adjacent_degree"), TransportFunction::adjacent_degree);
  EXPECT_STREQ(transport_function_name(TransportFunction::parent), "parent");
  EXPECT_THROW((void)parse_transport_function("nearest"), UsageError);
}

TEST(Stats, CanopyAdjacentDegreeTransport) {
  // Under the unimodular level law 2^{−k−1}: E deg² = E Σ_{y~x} deg(y) = 5.
  const auto cfg = EnsembleConfig::parse("ensemble=canopy\na_tail=2\n");
  const auto r = mass_transport_check(cfg, TransportFunction::adjacent_degree, 400, {8, 1});
  EXPECT_NEAR(r.extras.at("send"), 5.0, 3 * r.extras.at("send_stderr") + 1e-12);
  EXPECT_NEAR(r.value, 0.0, 3 * r.std_error);
}

TEST(Stats, ThreadCountDoesNotChangeResults) {
  const auto a = drift_estimate(agw("2:0.5,3:0.5"), 200, 12, {9, 1});
  const auto b = drift_estimate(agw("2:0.5,3:0.5"), 200, 12, {9, 3});
  std::ostringstream ja, jb;
  write_report_json(ja, a);
  write_report_json(jb, b);
  EXPECT_EQ(ja.str(), jb.str());
  const auto sq = parallel_map<std::size_t>(17, 4, [](std::size_t i) { return i * i; });
  for (std::size_t i = 0; i < sq.size(); ++i) EXPECT_EQ(sq[i], i * i);
}

TEST(Stats, TrialStreamsAreSplitsOfTheRoot) {
  EXPECT_EQ(trial_stream(11, 3).key(), Stream(11).split(3).key());
  EXPECT_NE(trial_stream(11, 3).key(), trial_stream(11, 4).key());
}

EstimateReport synthetic(const std::string& name, double value, double se, const std::string& params = "p") {
  EstimateReport r;
  r.statistic = name;
  r.value = value;
  r.std_error = se;
  r.trials = 10;
  r.params = params;
  return r;
}

TEST(Stats, InequalityExamples) {
  const auto ok = inequality_report(synthetic("ell", 0, 0), synthetic("h", 0, 0), synthetic("v", std::log(2.0), 0));
  EXPECT_TRUE(ok.lower_pass);
  EXPECT_TRUE(ok.upper_pass);
  EXPECT_DOUBLE_EQ(ok.lower_slack, 0.0);

  // ½ℓ² = 0.5 exceeds h = 0.1 by far more than 3σ.
  const auto bad = inequality_report(synthetic("ell", 1, 0.01), synthetic("h", 0.1, 0.01), synthetic("v", 1, 0.01));
  EXPECT_FALSE(bad.lower_pass);
  EXPECT_TRUE(bad.upper_pass);
  EXPECT_NEAR(bad.lower_slack, -0.4, 1e-15);
  EXPECT_NEAR(bad.lower_sigma, std::hypot(0.01, 0.01), 1e-15);

  // h = 2 above ℓv = 0.5: the upper side fails.
  const auto high = inequality_report(synthetic("ell", 0.5, 0.01), synthetic("h", 2, 0.01), synthetic("v", 1, 0.01));
  EXPECT_TRUE(high.lower_pass);
  EXPECT_FALSE(high.upper_pass);

  EXPECT_THROW((void)inequality_report(synthetic("ell", 0, 0), synthetic("h", 0, 0, "q"), synthetic("v", 1, 0)),
               UsageError);
}

TEST(Stats, ReportJsonRoundTrip) {
  auto r = synthetic("drift", 0.123456789012345, 0.000987654321, "ensemble=agw;offspring=2:1");
  r.seed = 42;
  r.horizon = 100;
  r.rejected_fraction = 0.03;
  r.extras["send"] = 1.5;
  std::stringstream s;
  write_report_json(s, r);
  const auto back = read_report_json(s);
  EXPECT_EQ(back.statistic, r.statistic);
  EXPECT_DOUBLE_EQ(back.value, r.value);
  EXPECT_DOUBLE_EQ(back.std_error, r.std_error);
  EXPECT_EQ(back.trials, r.trials);
  EXPECT_EQ(back.seed, r.seed);
  EXPECT_EQ(back.horizon, r.horizon);
  EXPECT_EQ(back.params, r.params);
  EXPECT_DOUBLE_EQ(back.extras.at("send"), 1.5);
}

TEST(Stats, CsvQuotesParams) {
  std::ostringstream out;
  write_reports_csv(out, {synthetic("drift", 0.5, 0.1, "a=1;b=2")});
  const auto text = out.str();
  EXPECT_EQ(text.rfind("statistic,value,stderr,trials,seed,params\n", 0), 0u);
  EXPECT_NE(text.find("\"a=1;b=2\""), std::string::npos);
}

TEST(Stats, PeelingDriftIsPositiveBelowCriticality) {
  const auto cfg = EnsembleConfig::parse("ensemble=peeling\nkappa=0.0625\n");
  const auto r = peeling_drift_estimate(cfg, 1000, 20, {10, 1});
  EXPECT_GT(r.value, 3 * r.std_error);
  EXPECT_GT(r.extras.at("acceptance_rate"), 0.0);
  EXPECT_THROW((void)drift_estimate(cfg, 10, 2, {10, 1}), UsageError);
}

}  // namespace
}  // namespace statlab
