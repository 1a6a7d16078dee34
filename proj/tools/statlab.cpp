#include <CLI11.hpp>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "statlab/errors.hpp"
#include "statlab/format.hpp"
#include "statlab/kernel.hpp"
#include "statlab/peeling.hpp"
#include "statlab/stats.hpp"
#include "statlab/walk.hpp"

namespace {

using namespace statlab;

enum Exit : int { ok = 0, usage = 1, budget = 2, assertion = 3 };

struct Common {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> overrides;
  std::string out_path;
  std::string format = "csv";
  std::uint32_t threads = 1;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--config", c.config_path, "ensemble config file (key=value lines)");
  sub->add_option("--seed", c.seed, "root seed; falls back to the config, then STATLAB_SEED");
  sub->add_option("--set", c.overrides, "override a config key, as key=value");
  sub->add_option("--out", c.out_path, "output file (default stdout)");
  sub->add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("--threads", c.threads, "worker threads")->check(CLI::PositiveNumber);
}

EnsembleConfig load_config(const Common& c) {
  if (c.config_path.empty()) throw UsageError("--config is required");
  auto cfg = EnsembleConfig::load(c.config_path);
  if (c.overrides.empty()) return cfg;
  std::map<std::string, std::string> kv;
  for (const auto& o : c.overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos) throw UsageError("--set expects key=value, got " + o);
    kv[o.substr(0, eq)] = o.substr(eq + 1);
  }
  return cfg.with(kv);
}

/// Explicit flag, then the config, then STATLAB_SEED, then a fresh seed that gets recorded.
std::uint64_t resolve_seed(const Common& c, const std::optional<EnsembleConfig>& cfg) {
  if (c.seed) return *c.seed;
  if (cfg && cfg->seed()) return *cfg->seed();
  if (const char* env = std::getenv("STATLAB_SEED")) {
    try {
      std::size_t used = 0;
      const auto v = std::stoull(env, &used);
      if (used == std::string(env).size()) return v;
    } catch (const std::exception&) {
    }
    throw UsageError(std::string("STATLAB_SEED is not an unsigned integer: ") + env);
  }
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

/// Parses `N` or `A..B`.
std::pair<std::uint32_t, std::uint32_t> parse_range(const std::string& s) {
  auto num = [&](const std::string& t) {
    std::size_t used = 0;
    unsigned long v = 0;
    try {
      v = std::stoul(t, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != t.size()) throw UsageError("bad range " + s);
    return static_cast<std::uint32_t>(v);
  };
  const auto dots = s.find("..");
  if (dots == std::string::npos) {
    const auto v = num(s);
    return {v, v};
  }
  const auto a = num(s.substr(0, dots));
  const auto b = num(s.substr(dots + 2));
  if (a > b) throw UsageError("empty range " + s);
  return {a, b};
}

std::vector<std::uint32_t> parse_list(const std::string& s) {
  std::vector<std::uint32_t> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    const auto [a, b] = parse_range(item);
    for (auto v = a; v <= b; ++v) out.push_back(v);
  }
  return out;
}

void emit(const Common& c, const std::string& text) {
  if (c.out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(c.out_path, std::ios::binary);
  if (!f) throw UsageError("cannot write " + c.out_path);
  f << text;
}

void require_csv(const Common& c, const char* verb) {
  if (c.format != "csv") throw UsageError(std::string(verb) + " only writes csv");
}

std::string provenance(std::uint64_t seed, const std::string& params) {
  return "# seed=" + std::to_string(seed) + " params=" + params + "\n";
}

// Trial 0 of the root seed drives single-replica verbs, exactly as in the estimators.
int run_generate(const Common& c, std::uint32_t rmax, std::uint32_t steps) {
  require_csv(c, "generate");
  const auto cfg = load_config(c);
  const auto seed = resolve_seed(c, cfg);
  std::ostringstream out;
  out << provenance(seed, cfg.echo());
  if (!cfg.is_graph_ensemble()) {
    const auto params = make_peeling_params(std::get<PeelingConfig>(cfg.params()).kappa);
    Stream rng = trial_stream(seed, 0).split(1);
    const auto path = sample_perimeter_volume_chain(params, steps, rng);
    out << "step,perimeter,volume\n";
    for (std::size_t k = 0; k < path.perimeter.size(); ++k) {
      out << k << ',' << path.perimeter[k] << ',' << path.volume[k] << '\n';
    }
  } else {
    Replica r = make_replica(cfg, trial_stream(seed, 0).split(0));
    // Finite samples are written whole; lazy ones are explored to the requested radius.
    if (r.grower && !ensure_ball(r, r.graph.root(), rmax)) throw FrontierError("could not explore the requested ball");
    write_graph(out, r.graph);
  }
  emit(c, out.str());
  return ok;
}

int run_walk(const Common& c, const std::string& graph_path, std::uint64_t steps) {
  require_csv(c, "walk");
  std::optional<EnsembleConfig> cfg;
  if (graph_path.empty()) cfg = load_config(c);
  const auto seed = resolve_seed(c, cfg);
  const auto walk_seed = trial_stream(seed, 0).split(1)();
  std::ostringstream out;
  if (cfg) {
    out << provenance(seed, cfg->echo());
    Replica r = make_replica(*cfg, trial_stream(seed, 0).split(0));
    const auto trace = sample_walk(r, r.graph.root(), steps, walk_seed);
    if (trace.touched_frontier) throw FrontierError("walk reached a vertex the ensemble cannot grow");
    write_trace_csv(out, trace, distance_profile(trace, r));
  } else {
    std::ifstream in(graph_path);
    if (!in) throw UsageError("cannot open " + graph_path);
    auto g = read_graph(in);
    out << provenance(seed, "graph=" + graph_path);
    const auto trace = sample_walk(g, g.root(), steps, walk_seed);
    write_trace_csv(out, trace, distance_profile(trace, g));
  }
  emit(c, out.str());
  return ok;
}

struct KernelFlags {
  std::string graph_path;
  std::string n_range = "1..10";
  std::string m_list = "1";
  std::uint32_t vertex = 0;
  bool alpha = false;
  bool entropy = false;
  bool mi = false;
  bool cv = false;
};

int run_kernel(const Common& c, const KernelFlags& k) {
  require_csv(c, "kernel");
  DiagnosticsRequest req;
  std::tie(req.n_min, req.n_max) = parse_range(k.n_range);
  if (req.n_min == 0) req.n_min = 1;
  const bool any = k.alpha || k.entropy || k.mi || k.cv;
  req.alpha = !any || k.alpha;
  req.entropy = !any || k.entropy;
  req.mutual_information = !any || k.mi;
  req.cv_margin = !any || k.cv;
  if (req.mutual_information) req.m_values = parse_list(k.m_list);

  std::optional<EnsembleConfig> cfg;
  if (k.graph_path.empty()) cfg = load_config(c);
  const auto seed = resolve_seed(c, cfg);
  std::ostringstream out;
  RootedMultigraph g;
  if (cfg) {
    Replica r = make_replica(*cfg, trial_stream(seed, 0).split(0));
    if (!ensure_ball(r, vertex_at(k.vertex), req.n_max + 1)) throw FrontierError("ball around the vertex is not explorable");
    g = std::move(r.graph);
    out << provenance(seed, cfg->echo());
  } else {
    std::ifstream in(k.graph_path);
    if (!in) throw UsageError("cannot open " + k.graph_path);
    g = read_graph(in);
    out << provenance(seed, "graph=" + k.graph_path);
  }
  if (!g.contains(vertex_at(k.vertex))) throw UsageError("vertex out of range");
  const auto d = kernel_diagnostics(g, vertex_at(k.vertex), req);
  write_diagnostics_csv(out, d, req);
  emit(c, out.str());
  if (req.cv_margin && d.cv_margin < 0.0) {
    std::cerr << "negative Carne-Varopoulos margin " << format_real(d.cv_margin) << '\n';
    return assertion;
  }
  return ok;
}

struct EstimateFlags {
  std::vector<std::string> statistics;
  std::uint64_t trials = 100;
  std::uint32_t steps = 1000;
  std::uint32_t n = 10;
  std::uint32_t rmax = 5;
};

int run_estimate(const Common& c, const EstimateFlags& e) {
  auto cfg = load_config(c);
  const RunOptions opts{resolve_seed(c, cfg), c.threads};
  std::vector<EstimateReport> reports;
  for (const auto& s : e.statistics) {
    if (s == "drift") {
      reports.push_back(drift_estimate(cfg, e.steps, e.trials, opts));
    } else if (s == "entropy") {
      reports.push_back(entropy_estimate(cfg, e.n, e.trials, opts));
    } else if (s == "horizon") {
      const auto h = horizon_estimates(cfg, e.n, e.trials, opts);
      reports.insert(reports.end(), {h.kernel_drift, h.entropy_increment, h.entropy_average, h.growth});
    } else if (s == "growth") {
      reports.push_back(growth_estimate(cfg, e.rmax, e.trials, opts, false));
    } else if (s == "growth_degree_biased") {
      reports.push_back(growth_estimate(cfg, e.rmax, e.trials, opts, true));
    } else if (s == "growth_exponent") {
      reports.push_back(growth_exponent_estimate(cfg, e.rmax, e.trials, opts));
    } else if (s == "degree_sphere") {
      reports.push_back(degree_sphere_correlation(cfg, e.rmax, e.trials, opts));
    } else if (s.rfind("mass_transport:", 0) == 0) {
      reports.push_back(mass_transport_check(cfg, parse_transport_function(s.substr(15)), e.trials, opts));
    } else if (s == "peeling_drift") {
      reports.push_back(peeling_drift_estimate(cfg, e.steps, e.trials, opts));
    } else {
      throw UsageError("unknown statistic " + s);
    }
  }
  std::ostringstream out;
  if (c.format == "json") {
    write_reports_json(out, reports);
  } else {
    write_reports_csv(out, reports);
  }
  emit(c, out.str());
  return ok;
}

EstimateReport load_report(const std::string& path, const std::vector<std::string>& preferred) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open " + path);
  return read_report_json(in, preferred);
}

int run_report(const Common& c, const std::string& ell, const std::string& h, const std::string& v) {
  const auto r = inequality_report(load_report(ell, {"kernel_drift", "drift"}),
                                   load_report(h, {"entropy_increment", "entropy"}), load_report(v, {"growth"}));
  std::ostringstream out;
  if (c.format == "json") {
    write_inequality_json(out, r);
  } else {
    write_inequality_csv(out, r);
  }
  emit(c, out.str());
  return r.lower_pass && r.upper_pass ? ok : assertion;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"statlab: random walks, entropy and growth on stationary random graphs"};
  app.require_subcommand(1);
  Common common;

  auto* generate = app.add_subcommand("generate", "sample one replica and write it as a graph file");
  add_common(generate, common);
  std::uint32_t gen_rmax = 4;
  std::uint32_t gen_steps = 1000;
  generate->add_option("--rmax", gen_rmax, "explored radius for lazily grown ensembles");
  generate->add_option("--steps", gen_steps, "path length for the peeling ensemble");

  auto* walk = app.add_subcommand("walk", "sample one walk and write its trace");
  add_common(walk, common);
  std::string walk_graph;
  std::uint64_t walk_steps = 100;
  walk->add_option("--graph", walk_graph, "walk on a graph file instead of a sampled replica");
  walk->add_option("--steps", walk_steps, "walk length");

  auto* kernel = app.add_subcommand("kernel", "exact n-step diagnostics at one vertex");
  add_common(kernel, common);
  KernelFlags kf;
  kernel->add_option("--graph", kf.graph_path, "graph file; otherwise a replica of --config");
  kernel->add_option("--n", kf.n_range, "horizon N or range A..B");
  kernel->add_option("--m", kf.m_list, "mutual-information m values, e.g. 1,2 or 1..3");
  kernel->add_option("--vertex", kf.vertex, "start vertex");
  kernel->add_flag("--alpha", kf.alpha, "report alpha_n");
  kernel->add_flag("--entropy", kf.entropy, "report H_n");
  kernel->add_flag("--mi", kf.mi, "report I_m^n");
  kernel->add_flag("--cv", kf.cv, "report the Carne-Varopoulos margin");

  auto* estimate = app.add_subcommand("estimate", "ensemble-level estimates");
  add_common(estimate, common);
  EstimateFlags ef;
  estimate->add_option("--statistic", ef.statistics,
                       "drift, entropy, horizon, growth, growth_degree_biased, growth_exponent, degree_sphere, "
                       "mass_transport:<adjacent|adjacent_degree|parent>, peeling_drift")
      ->required()
      ->delimiter(',');
  estimate->add_option("--trials", ef.trials, "replicas")->check(CLI::PositiveNumber);
  estimate->add_option("--steps", ef.steps, "walk or chain length")->check(CLI::PositiveNumber);
  estimate->add_option("--n", ef.n, "kernel horizon")->check(CLI::PositiveNumber);
  estimate->add_option("--rmax", ef.rmax, "ball radius")->check(CLI::PositiveNumber);

  auto* report = app.add_subcommand("report", "combine drift, entropy and growth into the inequality report");
  report->set_help_flag("--help", "print this help and exit");
  add_common(report, common);
  std::string ell_path;
  std::string h_path;
  std::string v_path;
  report->add_option("--ell", ell_path, "drift report (json)")->required();
  report->add_option("--h", h_path, "entropy report (json)")->required();
  report->add_option("--v", v_path, "growth report (json)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ok : usage;
  }

  try {
    if (generate->parsed()) return run_generate(common, gen_rmax, gen_steps);
    if (walk->parsed()) return run_walk(common, walk_graph, walk_steps);
    if (kernel->parsed()) return run_kernel(common, kf);
    if (estimate->parsed()) return run_estimate(common, ef);
    if (report->parsed()) return run_report(common, ell_path, h_path, v_path);
  } catch (const FrontierError& e) {
    std::cerr << "frontier: " << e.what() << '\n';
    return budget;
  } catch (const BudgetError& e) {
    std::cerr << "budget: " << e.what() << '\n';
    return budget;
  } catch (const AssertionError& e) {
    std::cerr << "assertion: " << e.what() << '\n';
    return assertion;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return usage;
  }
  return usage;
}
