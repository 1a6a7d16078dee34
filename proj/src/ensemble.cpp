#include "statlab/ensemble.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "statlab/bridge_tree.hpp"
#include "statlab/errors.hpp"
#include "statlab/format.hpp"

namespace statlab {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc{} || res.ptr != v.data() + v.size()) throw UsageError("bad integer for " + key + ": " + v);
  return out;
}

double parse_real(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc{} || res.ptr != v.data() + v.size()) throw UsageError("bad number for " + key + ": " + v);
  return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw UsageError("bad boolean for " + key + ": " + v);
}

std::vector<std::uint32_t> parse_list(const std::string& key, std::string_view v) {
  std::vector<std::uint32_t> out;
  while (!v.empty()) {
    const auto colon = v.find(':');
    out.push_back(static_cast<std::uint32_t>(parse_u64(key, std::string(v.substr(0, colon)))));
    v = colon == std::string_view::npos ? std::string_view{} : v.substr(colon + 1);
  }
  return out;
}

std::string join_list(const std::vector<std::uint32_t>& xs) {
  std::string s;
  for (auto x : xs) {
    if (!s.empty()) s += ':';
    s += std::to_string(x);
  }
  return s;
}

void parse_tail(CanopySpec& spec, const std::string& v) {
  if (v == "linear") {
    spec.tail = CanopySpec::Tail::linear;
  } else if (v.rfind("periodic:", 0) == 0) {
    spec.tail = CanopySpec::Tail::periodic;
    spec.period = parse_list("a_tail", std::string_view(v).substr(9));
  } else if (v.rfind("constant:", 0) == 0) {
    spec.tail = CanopySpec::Tail::constant;
    spec.constant = static_cast<std::uint32_t>(parse_u64("a_tail", v.substr(9)));
  } else {
    spec.tail = CanopySpec::Tail::constant;
    spec.constant = static_cast<std::uint32_t>(parse_u64("a_tail", v));
  }
  spec.validate();
}

}  // namespace

EnsembleConfig EnsembleConfig::parse(std::string_view text) {
  std::map<std::string, std::string> entries;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = trim(line.substr(0, line.find('#')));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw UsageError("config line " + std::to_string(line_no) + " is not key=value");
    entries[trim(body.substr(0, eq))] = trim(body.substr(eq + 1));
  }
  return from_entries(entries);
}

EnsembleConfig EnsembleConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

EnsembleConfig EnsembleConfig::from_entries(const std::map<std::string, std::string>& entries) {
  auto find = [&](const char* key) -> const std::string* {
    auto it = entries.find(key);
    return it == entries.end() ? nullptr : &it->second;
  };
  const std::string* kind = find("ensemble");
  if (kind == nullptr) throw UsageError("config needs an `ensemble` key");

  std::vector<std::string> allowed{"ensemble", "seed", "loopify"};
  EnsembleConfig cfg;
  if (*kind == "agw") {
    AgwParams p;
    if (auto v = find("offspring")) p.offspring = OffspringDistribution::parse(*v);
    cfg.params_ = p;
    allowed.insert(allowed.end(), {"offspring"});
  } else if (*kind == "canopy") {
    CanopyParams p;
    if (auto v = find("a_prefix")) p.spec.prefix = parse_list("a_prefix", *v);
    if (auto v = find("a_tail")) parse_tail(p.spec, *v);
    if (auto v = find("root_level")) p.root_level = static_cast<std::uint32_t>(parse_u64("root_level", *v));
    p.spec.validate();
    cfg.params_ = p;
    allowed.insert(allowed.end(), {"a_prefix", "a_tail", "root_level"});
  } else if (*kind == "bridge") {
    BridgeParams p;
    if (auto v = find("core_radius")) p.core_radius = static_cast<std::uint32_t>(parse_u64("core_radius", *v));
    if (auto v = find("budget")) p.expansion_budget = parse_u64("budget", *v);
    if (p.expansion_budget == 0) throw UsageError("budget must be positive");
    cfg.params_ = p;
    allowed.insert(allowed.end(), {"core_radius", "budget"});
  } else if (*kind == "peeling") {
    PeelingConfig p;
    if (auto v = find("kappa")) p.kappa = parse_real("kappa", *v);
    cfg.params_ = p;
    allowed.insert(allowed.end(), {"kappa"});
  } else if (*kind == "delaunay_e2" || *kind == "delaunay_h2") {
    DelaunayParams p;
    p.model = *kind == "delaunay_e2" ? Geometry::euclidean_2d : Geometry::hyperbolic_2d;
    if (p.model == Geometry::hyperbolic_2d) {
      p.radius = 6.0;
      p.margin = 3.0;
    }
    if (auto v = find("radius")) p.radius = parse_real("radius", *v);
    if (auto v = find("margin")) p.margin = parse_real("margin", *v);
    if (!(p.radius > 0.0) || !(p.margin > 0.0)) throw UsageError("radius and margin must be positive");
    cfg.params_ = p;
    allowed.insert(allowed.end(), {"radius", "margin"});
  } else {
    throw UsageError("unknown ensemble " + *kind);
  }
  for (const auto& [key, value] : entries) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw UsageError("key `" + key + "` does not apply to ensemble " + *kind);
    }
  }
  if (auto v = find("loopify")) cfg.loopify_ = parse_bool("loopify", *v);
  if (auto v = find("seed")) cfg.seed_ = parse_u64("seed", *v);
  return cfg;
}

EnsembleConfig EnsembleConfig::with(const std::map<std::string, std::string>& overrides) const {
  auto e = entries();
  if (seed_) e["seed"] = std::to_string(*seed_);
  for (const auto& [k, v] : overrides) e[k] = v;
  return from_entries(e);
}

std::string EnsembleConfig::name() const {
  return std::visit(
      [](const auto& p) -> std::string {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, AgwParams>) return "agw";
        if constexpr (std::is_same_v<T, CanopyParams>) return "canopy";
        if constexpr (std::is_same_v<T, BridgeParams>) return "bridge";
        if constexpr (std::is_same_v<T, PeelingConfig>) return "peeling";
        if constexpr (std::is_same_v<T, DelaunayParams>) {
          return p.model == Geometry::euclidean_2d ? "delaunay_e2" : "delaunay_h2";
        }
      },
      params_);
}

std::map<std::string, std::string> EnsembleConfig::entries() const {
  std::map<std::string, std::string> e;
  e["ensemble"] = name();
  e["loopify"] = loopify_ ? "true" : "false";
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, AgwParams>) {
          e["offspring"] = p.offspring.to_string();
        } else if constexpr (std::is_same_v<T, CanopyParams>) {
          e["a_prefix"] = join_list(p.spec.prefix);
          switch (p.spec.tail) {
            case CanopySpec::Tail::constant:
              e["a_tail"] = "constant:" + std::to_string(p.spec.constant);
              break;
            case CanopySpec::Tail::linear:
              e["a_tail"] = "linear";
              break;
            case CanopySpec::Tail::periodic:
              e["a_tail"] = "periodic:" + join_list(p.spec.period);
              break;
          }
          if (p.root_level) e["root_level"] = std::to_string(*p.root_level);
        } else if constexpr (std::is_same_v<T, BridgeParams>) {
          e["core_radius"] = std::to_string(p.core_radius);
          e["budget"] = std::to_string(p.expansion_budget);
        } else if constexpr (std::is_same_v<T, PeelingConfig>) {
          e["kappa"] = format_real(p.kappa);
        } else {
          e["radius"] = format_real(p.radius);
          e["margin"] = format_real(p.margin);
        }
      },
      params_);
  if (e.count("a_prefix") && e["a_prefix"].empty()) e.erase("a_prefix");
  return e;
}

std::string EnsembleConfig::echo() const {
  std::string out;
  for (const auto& [k, v] : entries()) {
    if (!out.empty()) out += ';';
    out += k + '=' + v;
  }
  return out;
}

Replica make_replica(const EnsembleConfig& config, Stream rng) {
  Replica r = std::visit(
      [&](const auto& p) -> Replica {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, AgwParams>) {
          return make_agw_replica(p.offspring, rng);
        } else if constexpr (std::is_same_v<T, CanopyParams>) {
          return make_canopy_replica(p.spec, rng, p.root_level);
        } else if constexpr (std::is_same_v<T, BridgeParams>) {
          return make_bridge_tree_replica(rng, p.expansion_budget);
        } else if constexpr (std::is_same_v<T, PeelingConfig>) {
          throw UsageError("the peeling ensemble produces chain paths, not graphs");
        } else {
          const auto sample = sample_poisson_points(p.model, p.radius, p.margin, rng);
          Replica out;
          out.graph = delaunay_rooted_graph(sample).graph;
          return out;
        }
      },
      config.params());
  if (config.loopify()) {
    r.graph = loopify(r.graph);
    if (r.grower) r.grower = std::make_unique<LoopifyGrower>(std::move(r.grower));
  }
  return r;
}

}  // namespace statlab
