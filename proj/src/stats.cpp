#include "statlab/stats.hpp"

#include <cmath>
#include <istream>
#include <limits>
#include <json.hpp>
#include <optional>
#include <ostream>

#include "statlab/agw.hpp"
#include "statlab/canopy.hpp"
#include "statlab/errors.hpp"
#include "statlab/format.hpp"
#include "statlab/kernel.hpp"
#include "statlab/peeling.hpp"
#include "statlab/walk.hpp"

namespace statlab {

namespace {

using Outcome = std::optional<std::vector<double>>;
using TrialFn = std::function<Outcome(Replica&, Stream&)>;

struct TrialBatch {
  std::vector<std::vector<double>> accepted;
  std::uint64_t attempted = 0;

  [[nodiscard]] double rejected_fraction() const {
    return attempted == 0 ? 0.0 : static_cast<double>(attempted - accepted.size()) / static_cast<double>(attempted);
  }
};

/// Trial t builds its replica from split(0) of its stream and draws everything else from split(1).
TrialBatch run_trials(const EnsembleConfig& config, std::uint64_t trials, const RunOptions& opts, const TrialFn& f) {
  if (!config.is_graph_ensemble()) throw UsageError("ensemble " + config.name() + " has no graph replicas");
  if (trials == 0) throw UsageError("trials must be positive");
  const auto outcomes = parallel_map<Outcome>(trials, opts.threads, [&](std::size_t t) -> Outcome {
    const Stream ts = trial_stream(opts.seed, t);
    try {
      Replica r = make_replica(config, ts.split(0));
      Stream work = ts.split(1);
      return f(r, work);
    } catch (const FrontierError&) {
      return std::nullopt;
    } catch (const BudgetError&) {
      return std::nullopt;
    }
  });
  TrialBatch batch;
  batch.attempted = trials;
  for (const auto& o : outcomes) {
    if (o) batch.accepted.push_back(*o);
  }
  if (batch.accepted.empty()) throw FrontierError("every replica touched the frontier or exhausted its budget");
  return batch;
}

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

/// Self-normalized weighted mean Σ w y / Σ w with linearized standard error.
MeanSe weighted_mean(const std::vector<double>& y, const std::vector<double>& w) {
  const auto k = y.size();
  double sw = 0.0;
  double swy = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    sw += w[i];
    swy += w[i] * y[i];
  }
  MeanSe out;
  out.mean = swy / sw;
  if (k < 2) return out;
  double ss = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double e = w[i] * (y[i] - out.mean);
    ss += e * e;
  }
  out.se = std::sqrt(ss * static_cast<double>(k) / static_cast<double>(k - 1)) / sw;
  return out;
}

MeanSe column_mean(const TrialBatch& b, std::size_t col) {
  std::vector<double> y;
  y.reserve(b.accepted.size());
  for (const auto& row : b.accepted) y.push_back(row.at(col));
  return weighted_mean(y, std::vector<double>(y.size(), 1.0));
}

EstimateReport make_report(const std::string& statistic, const EnsembleConfig& config, const RunOptions& opts,
                           const TrialBatch& b, MeanSe m, std::uint32_t horizon) {
  EstimateReport r;
  r.statistic = statistic;
  r.value = m.mean;
  r.std_error = m.se;
  r.trials = b.accepted.size();
  r.params = config.echo();
  r.seed = opts.seed;
  r.rejected_fraction = b.rejected_fraction();
  r.horizon = horizon;
  return r;
}

double root_degree(const Replica& r) { return static_cast<double>(r.graph.degree_denominator(r.graph.root())); }

std::uint32_t walk_endpoint_distance(Replica& r, const WalkTrace& trace) {
  const VertexId a = trace.vertices.front();
  const VertexId b = trace.vertices.back();
  if (r.grower) return distance_with_growth(r, a, b);
  return graph_distance(r.graph, a, b, FrontierPolicy::known_edges);
}

/// Columns: kernel drift, entropy increment, entropy average, growth, minimum CV margin.
Outcome kernel_columns(Replica& r, std::uint32_t n, bool check_mi) {
  const VertexId x = r.graph.root();
  // The margin needs the degree of every vertex p^n can reach, hence radius n + 1.
  if (!ensure_ball(r, x, n + 1)) return std::nullopt;
  const auto& g = r.graph;
  const TransitionKernel k(g);
  std::vector<SparseDistribution> laws;
  laws.push_back(SparseDistribution::point_mass(x, g.vertex_count()));
  for (std::uint32_t i = 1; i <= n; ++i) laws.push_back(k.push(laws.back()));

  double cv = std::numeric_limits<double>::infinity();
  for (std::uint32_t i = 1; i <= n; ++i) cv = std::min(cv, carne_varopoulos_margin(g, x, i, laws[i]));
  if (cv < 0.0) throw AssertionError("negative Carne-Varopoulos margin " + format_real(cv));

  if (check_mi && n >= 3) {
    const double earlier = mutual_information(k, x, 1, n - 1);
    const double later = mutual_information(k, x, 1, n);
    if (later > earlier + 1e-10) {
      throw AssertionError("mutual information increased: I_1^" + std::to_string(n - 1) + " = " +
                           format_real(earlier) + " < I_1^" + std::to_string(n) + " = " + format_real(later));
    }
  }

  const auto dist = distances_within(g, x, n, FrontierPolicy::known_edges);
  double mean_distance = 0.0;
  laws[n].for_each([&](VertexId z, double p) { mean_distance += p * dist.at(index_of(z)); });
  std::uint64_t ball = 0;
  for (auto d : dist) ball += d != unreached ? 1 : 0;

  const double hn = shannon_entropy(laws[n]);
  const double hprev = shannon_entropy(laws[n - 1]);
  const double dn = static_cast<double>(n);
  return std::vector<double>{mean_distance / dn, hn - hprev, hn / dn, std::log(static_cast<double>(ball)) / dn, cv};
}

std::vector<VertexId> distinct_neighbors(const RootedMultigraph& g, VertexId x) {
  std::vector<VertexId> out;
  for (const auto& e : g.neighbors(x)) out.push_back(e.neighbor);
  return out;
}

/// Parent of every explored-tree vertex, for ensembles that orient edges.
std::function<std::optional<VertexId>(VertexId)> parent_map(Replica& r) {
  Grower* grower = r.grower.get();
  if (auto* lazy = dynamic_cast<LoopifyGrower*>(grower)) grower = &lazy->inner();
  if (auto* agw = dynamic_cast<AgwGrower*>(grower)) {
    return [agw](VertexId v) -> std::optional<VertexId> { return agw->parent(v); };
  }
  if (auto* canopy = dynamic_cast<CanopyGrower*>(grower)) {
    const RootedMultigraph* g = &r.graph;
    return [canopy, g](VertexId v) -> std::optional<VertexId> {
      for (const auto& e : g->neighbors(v)) {
        if (canopy->level(e.neighbor) == canopy->level(v) + 1) return e.neighbor;
      }
      if (g->is_frontier(v)) throw FrontierError("parent of an unexplored canopy vertex is unknown");
      return std::nullopt;
    };
  }
  throw UsageError("the parent test function needs an agw or canopy ensemble");
}

}  // namespace

Stream trial_stream(std::uint64_t seed, std::uint64_t trial) { return Stream(seed).split(trial); }

EstimateReport drift_estimate(const EnsembleConfig& config, std::uint32_t n, std::uint64_t trials,
                              const RunOptions& opts) {
  if (n == 0) throw UsageError("walk length must be positive");
  const auto batch = run_trials(config, trials, opts, [n](Replica& r, Stream& rng) -> Outcome {
    const auto trace = sample_walk(r, r.graph.root(), n, rng());
    if (trace.touched_frontier) return std::nullopt;
    return std::vector<double>{walk_endpoint_distance(r, trace) / static_cast<double>(n)};
  });
  return make_report("drift", config, opts, batch, column_mean(batch, 0), n);
}

EstimateReport peeling_drift_estimate(const EnsembleConfig& config, std::uint32_t n, std::uint64_t trials,
                                      const RunOptions& opts) {
  const auto* peeling = std::get_if<PeelingConfig>(&config.params());
  if (peeling == nullptr) throw UsageError("peeling drift needs the peeling ensemble");
  if (n == 0 || trials == 0) throw UsageError("steps and trials must be positive");
  const auto params = make_peeling_params(peeling->kappa);
  const auto rows = parallel_map<std::vector<double>>(trials, opts.threads, [&](std::size_t t) {
    Stream rng = trial_stream(opts.seed, t).split(1);
    const auto path = sample_perimeter_volume_chain(params, n, rng);
    const double dx = static_cast<double>(path.perimeter.back() - path.perimeter.front()) / n;
    const double dy = static_cast<double>(path.volume.back() - path.volume.front()) / n;
    return std::vector<double>{dx, dy, path.acceptance_rate};
  });
  TrialBatch batch;
  batch.attempted = trials;
  batch.accepted = rows;
  auto report = make_report("peeling_drift", config, opts, batch, column_mean(batch, 0), n);
  report.extras["volume_rate"] = column_mean(batch, 1).mean;
  report.extras["acceptance_rate"] = column_mean(batch, 2).mean;
  report.extras["alpha"] = params.alpha;
  return report;
}

EstimateReport entropy_estimate(const EnsembleConfig& config, std::uint32_t n, std::uint64_t trials,
                                const RunOptions& opts) {
  if (n == 0) throw UsageError("entropy horizon must be positive");
  const auto batch =
      run_trials(config, trials, opts, [n](Replica& r, Stream&) { return kernel_columns(r, n, false); });
  auto report = make_report("entropy", config, opts, batch, column_mean(batch, 2), n);
  double cv = std::numeric_limits<double>::infinity();
  for (const auto& row : batch.accepted) cv = std::min(cv, row[4]);
  report.extras["min_cv_margin"] = cv;
  return report;
}

HorizonEstimates horizon_estimates(const EnsembleConfig& config, std::uint32_t n, std::uint64_t trials,
                                   const RunOptions& opts) {
  if (n < 2) throw UsageError("horizon estimates need n >= 2");
  const auto batch =
      run_trials(config, trials, opts, [n](Replica& r, Stream&) { return kernel_columns(r, n, true); });
  HorizonEstimates out;
  out.kernel_drift = make_report("kernel_drift", config, opts, batch, column_mean(batch, 0), n);
  out.entropy_increment = make_report("entropy_increment", config, opts, batch, column_mean(batch, 1), n);
  out.entropy_average = make_report("entropy", config, opts, batch, column_mean(batch, 2), n);
  out.growth = make_report("growth", config, opts, batch, column_mean(batch, 3), n);
  out.min_cv_margin = std::numeric_limits<double>::infinity();
  for (const auto& row : batch.accepted) out.min_cv_margin = std::min(out.min_cv_margin, row[4]);
  return out;
}

EstimateReport growth_estimate(const EnsembleConfig& config, std::uint32_t r_max, std::uint64_t trials,
                               const RunOptions& opts, bool degree_biased) {
  if (r_max < 2) throw UsageError("growth estimate needs r_max >= 2");
  const auto batch = run_trials(config, trials, opts, [&](Replica& r, Stream&) -> Outcome {
    if (!ensure_ball(r, r.graph.root(), r_max)) return std::nullopt;
    const auto profile = ball_profile(r.graph, r_max);
    const double deg = root_degree(r);
    const double weight = (degree_biased ? deg : 1.0) / (r.degree_biased_root ? deg : 1.0);
    return std::vector<double>{std::log(static_cast<double>(profile.sizes[r_max])) / r_max, weight};
  });
  std::vector<double> y;
  std::vector<double> w;
  for (const auto& row : batch.accepted) {
    y.push_back(row[0]);
    w.push_back(row[1]);
  }
  return make_report(degree_biased ? "growth_degree_biased" : "growth", config, opts, batch, weighted_mean(y, w),
                     r_max);
}

EstimateReport growth_exponent_estimate(const EnsembleConfig& config, std::uint32_t r_max, std::uint64_t trials,
                                        const RunOptions& opts) {
  if (r_max < 4) throw UsageError("growth exponent fit needs r_max >= 4");
  const std::uint32_t r_lo = r_max / 2;
  const auto batch = run_trials(config, trials, opts, [&](Replica& r, Stream&) -> Outcome {
    if (!ensure_ball(r, r.graph.root(), r_max)) return std::nullopt;
    const auto profile = ball_profile(r.graph, r_max);
    double sx = 0.0;
    double sy = 0.0;
    double sxx = 0.0;
    double sxy = 0.0;
    const double count = r_max - r_lo + 1;
    for (std::uint32_t s = r_lo; s <= r_max; ++s) {
      const double lx = std::log(static_cast<double>(s));
      const double ly = std::log(static_cast<double>(profile.sizes[s]));
      sx += lx;
      sy += ly;
      sxx += lx * lx;
      sxy += lx * ly;
    }
    std::vector<double> row{(count * sxy - sx * sy) / (count * sxx - sx * sx)};
    for (std::uint32_t s = 1; s <= r_max; ++s) row.push_back(std::log(static_cast<double>(profile.sizes[s])));
    return row;
  });
  auto report = make_report("growth_exponent", config, opts, batch, column_mean(batch, 0), r_max);
  for (std::uint32_t s = 1; s <= r_max; ++s) report.extras["log_ball_" + std::to_string(s)] = column_mean(batch, s).mean;
  return report;
}

EstimateReport degree_sphere_correlation(const EnsembleConfig& config, std::uint32_t r, std::uint64_t trials,
                                         const RunOptions& opts) {
  if (r == 0) throw UsageError("sphere radius must be positive");
  const auto batch = run_trials(config, trials, opts, [&](Replica& rep, Stream&) -> Outcome {
    if (!ensure_ball(rep, rep.graph.root(), r)) return std::nullopt;
    const auto profile = ball_profile(rep.graph, r);
    return std::vector<double>{root_degree(rep), static_cast<double>(profile.sphere_sizes[r])};
  });
  // Ratio Σ deg·S / Σ S is the weighted mean of deg with weights S.
  std::vector<double> deg;
  std::vector<double> sphere;
  for (const auto& row : batch.accepted) {
    deg.push_back(row[0]);
    sphere.push_back(row[1]);
  }
  auto report = make_report("degree_sphere_ratio", config, opts, batch, weighted_mean(deg, sphere), r);
  report.extras["mean_degree"] = column_mean(batch, 0).mean;
  report.extras["mean_sphere"] = column_mean(batch, 1).mean;
  return report;
}

TransportFunction parse_transport_function(const std::string& name) {
  if (name == "adjacent") return TransportFunction::adjacent;
  if (name == "adjacent_degree") return TransportFunction::adjacent_degree;
  if (name == "parent") return TransportFunction::parent;
  throw UsageError("unknown transport function " + name);
}

const char* transport_function_name(TransportFunction f) noexcept {
  switch (f) {
    case TransportFunction::adjacent:
      return "adjacent";
    case TransportFunction::adjacent_degree:
      return "adjacent_degree";
    case TransportFunction::parent:
      return "parent";
  }
  return "?";
}

EstimateReport mass_transport_check(const EnsembleConfig& config, TransportFunction f, std::uint64_t trials,
                                    const RunOptions& opts) {
  const auto batch = run_trials(config, trials, opts, [f](Replica& r, Stream&) -> Outcome {
    const VertexId x = r.graph.root();
    if (!ensure_ball(r, x, 2)) return std::nullopt;
    const auto& g = r.graph;
    double send = 0.0;
    double receive = 0.0;
    switch (f) {
      case TransportFunction::adjacent:
        send = receive = static_cast<double>(distinct_neighbors(g, x).size());
        break;
      case TransportFunction::adjacent_degree: {
        const auto nbrs = distinct_neighbors(g, x);
        for (auto y : nbrs) send += static_cast<double>(g.degree_denominator(y));
        receive = static_cast<double>(nbrs.size()) * static_cast<double>(g.degree_denominator(x));
        break;
      }
      case TransportFunction::parent: {
        const auto parent = parent_map(r);
        send = parent(x).has_value() ? 1.0 : 0.0;
        for (auto y : distinct_neighbors(g, x)) receive += parent(y) == x ? 1.0 : 0.0;
        break;
      }
    }
    const double weight = r.degree_biased_root ? 1.0 / root_degree(r) : 1.0;
    return std::vector<double>{send, receive, weight};
  });
  std::vector<double> s;
  std::vector<double> c;
  std::vector<double> d;
  std::vector<double> w;
  for (const auto& row : batch.accepted) {
    s.push_back(row[0]);
    c.push_back(row[1]);
    d.push_back(row[0] - row[1]);
    w.push_back(row[2]);
  }
  auto report = make_report(std::string("mass_transport_") + transport_function_name(f), config, opts, batch,
                            weighted_mean(d, w), 2);
  const auto send = weighted_mean(s, w);
  const auto receive = weighted_mean(c, w);
  report.extras["send"] = send.mean;
  report.extras["send_stderr"] = send.se;
  report.extras["receive"] = receive.mean;
  report.extras["receive_stderr"] = receive.se;
  return report;
}

InequalityReport inequality_report(const EstimateReport& ell, const EstimateReport& h, const EstimateReport& v) {
  if (ell.params != h.params || ell.params != v.params) {
    throw UsageError("inequality report needs estimates from one configuration");
  }
  InequalityReport out{ell, h, v};
  const double l = ell.value;
  out.lower_slack = h.value - 0.5 * l * l;
  out.upper_slack = l * v.value - h.value;
  out.lower_sigma = std::hypot(h.std_error, l * ell.std_error);
  out.upper_sigma = std::sqrt(std::pow(v.value * ell.std_error, 2) + std::pow(l * v.std_error, 2) +
                              std::pow(h.std_error, 2));
  out.lower_pass = out.lower_slack >= -3.0 * out.lower_sigma;
  out.upper_pass = out.upper_slack >= -3.0 * out.upper_sigma;
  return out;
}

namespace {

// Numbers go through format_real so that output bytes do not depend on the JSON library's
// float printer.
nlohmann::ordered_json to_json(const EstimateReport& r) {
  nlohmann::ordered_json j;
  j["statistic"] = r.statistic;
  j["value"] = format_real(r.value);
  j["stderr"] = format_real(r.std_error);
  j["trials"] = r.trials;
  j["seed"] = r.seed;
  j["rejected_fraction"] = format_real(r.rejected_fraction);
  j["horizon"] = r.horizon;
  j["params"] = r.params;
  auto extras = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.extras) extras[k] = format_real(v);
  j["extras"] = extras;
  return j;
}

double real_field(const nlohmann::json& j, const char* key) {
  const auto& v = j.at(key);
  if (v.is_string()) return std::stod(v.get<std::string>());
  return v.get<double>();
}

EstimateReport from_json(const nlohmann::json& j) {
  EstimateReport r;
  r.statistic = j.at("statistic").get<std::string>();
  r.value = real_field(j, "value");
  r.std_error = real_field(j, "stderr");
  r.trials = j.at("trials").get<std::uint64_t>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.rejected_fraction = j.contains("rejected_fraction") ? real_field(j, "rejected_fraction") : 0.0;
  r.horizon = j.value("horizon", 0U);
  r.params = j.at("params").get<std::string>();
  if (j.contains("extras")) {
    for (const auto& [k, v] : j.at("extras").items()) r.extras[k] = v.is_string() ? std::stod(v.get<std::string>()) : v.get<double>();
  }
  if (r.std_error < 0.0 || r.rejected_fraction < 0.0 || r.rejected_fraction > 1.0) {
    throw UsageError("report " + r.statistic + " has out-of-range fields");
  }
  return r;
}

std::string csv_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

void csv_row(std::ostream& out, const EstimateReport& r) {
  out << r.statistic << ',' << format_real(r.value) << ',' << format_real(r.std_error) << ',' << r.trials << ','
      << r.seed << ',' << csv_quote(r.params) << '\n';
}

}  // namespace

void write_report_json(std::ostream& out, const EstimateReport& r) { out << to_json(r).dump(2) << '\n'; }

void write_reports_json(std::ostream& out, const std::vector<EstimateReport>& rs) {
  if (rs.size() == 1) {
    write_report_json(out, rs.front());
    return;
  }
  auto arr = nlohmann::ordered_json::array();
  for (const auto& r : rs) arr.push_back(to_json(r));
  out << arr.dump(2) << '\n';
}

void write_reports_csv(std::ostream& out, const std::vector<EstimateReport>& rs) {
  out << "statistic,value,stderr,trials,seed,params\n";
  for (const auto& r : rs) csv_row(out, r);
}

void write_inequality_json(std::ostream& out, const InequalityReport& r) {
  nlohmann::ordered_json j;
  j["ell"] = to_json(r.ell);
  j["h"] = to_json(r.h);
  j["v"] = to_json(r.v);
  j["lower_slack"] = format_real(r.lower_slack);
  j["lower_sigma"] = format_real(r.lower_sigma);
  j["lower_verdict"] = r.lower_pass ? "pass" : "fail";
  j["upper_slack"] = format_real(r.upper_slack);
  j["upper_sigma"] = format_real(r.upper_sigma);
  j["upper_verdict"] = r.upper_pass ? "pass" : "fail";
  j["band"] = "3 sigma";
  out << j.dump(2) << '\n';
}

void write_inequality_csv(std::ostream& out, const InequalityReport& r) {
  write_reports_csv(out, {r.ell, r.h, r.v});
  out << "side,slack,sigma,verdict\n";
  out << "lower," << format_real(r.lower_slack) << ',' << format_real(r.lower_sigma) << ','
      << (r.lower_pass ? "pass" : "fail") << '\n';
  out << "upper," << format_real(r.upper_slack) << ',' << format_real(r.upper_sigma) << ','
      << (r.upper_pass ? "pass" : "fail") << '\n';
}

EstimateReport read_report_json(std::istream& in, const std::vector<std::string>& preferred) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
    if (j.is_array()) {
      if (j.empty()) throw UsageError("empty report array");
      for (const auto& name : preferred) {
        for (const auto& item : j) {
          if (item.contains("statistic") && item["statistic"] == name) return from_json(item);
        }
      }
      return from_json(j.front());
    }
    return from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("malformed report: ") + e.what());
  }
}

}  // namespace statlab
