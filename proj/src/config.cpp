#include "pushsum/config.hpp"

#include <array>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace pushsum {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& field, const std::string& what) {
  throw ConfigError(field + ": " + what);
}

void reject_unknown(const json& obj, const std::string& where, std::initializer_list<const char*> keys) {
  const std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.contains(key)) bad(where.empty() ? key : where + "." + key, "unknown key");
  }
}

const json& require(const json& obj, const std::string& key, const std::string& field) {
  if (!obj.contains(key)) bad(field, "missing");
  return obj.at(key);
}

template <typename T>
T get(const json& v, const std::string& field) {
  try {
    if constexpr (std::is_same_v<T, double>) {
      if (!v.is_number()) bad(field, "expected a number");
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) bad(field, "expected an integer");
      if constexpr (std::is_unsigned_v<T>) {
        if (v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0) {
          bad(field, "expected a non-negative integer");
        }
      }
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) bad(field, "expected a string");
    }
    return v.get<T>();
  } catch (const json::exception& e) {
    bad(field, e.what());
  }
}

template <typename T>
T get_or(const json& obj, const std::string& key, const std::string& field, T fallback) {
  return obj.contains(key) ? get<T>(obj.at(key), field) : fallback;
}

template <typename E, std::size_t N>
E enum_of(const std::string& value, const std::string& field,
          const std::array<std::pair<const char*, E>, N>& names) {
  for (const auto& [name, e] : names) {
    if (value == name) return e;
  }
  std::string options;
  for (const auto& [name, e] : names) options += (options.empty() ? "" : ", ") + std::string(name);
  bad(field, "unknown value '" + value + "' (expected one of " + options + ")");
}

constexpr std::array<std::pair<const char*, Protocol>, 3> kProtocols{
    {{"ordinary", Protocol::ordinary}, {"pushsum", Protocol::pushsum}, {"robust", Protocol::robust}}};
constexpr std::array<std::pair<const char*, Regime::Kind>, 3> kRegimes{{{"ordinary", Regime::Kind::ordinary},
                                                                       {"pushsum", Regime::Kind::pushsum},
                                                                       {"robust", Regime::Kind::robust}}};
constexpr std::array<std::pair<const char*, ScheduleKind>, 4> kKinds{
    {{"logarithmic", ScheduleKind::logarithmic},
     {"constant", ScheduleKind::constant},
     {"geometric", ScheduleKind::geometric},
     {"explicit", ScheduleKind::explicit_lengths}}};
constexpr std::array<std::pair<const char*, WakeMode>, 2> kWakeModes{
    {{"independent", WakeMode::independent}, {"sequential", WakeMode::sequential}}};
constexpr std::array<std::pair<const char*, CoveringMode>, 2> kCovering{
    {{"all_edges", CoveringMode::all_edges}, {"strongly_connected", CoveringMode::strongly_connected}}};
constexpr std::array<std::pair<const char*, AuditLevel>, 3> kAudit{{{"none", AuditLevel::none},
                                                                    {"boundaries", AuditLevel::boundaries},
                                                                    {"every_iteration", AuditLevel::every_iteration}}};
constexpr std::array<std::pair<const char*, Sampling>, 3> kSampling{{{"auto", Sampling::automatic},
                                                                     {"every_iteration", Sampling::every_iteration},
                                                                     {"boundaries", Sampling::boundaries}}};
constexpr std::array<std::pair<const char*, OrdinaryWeights>, 2> kWeights{
    {{"equal", OrdinaryWeights::equal}, {"symmetric", OrdinaryWeights::symmetric}}};

DirectedGraph parse_graph(const json& g, Protocol protocol) {
  if (!g.is_object()) bad("graph", "expected an object");
  reject_unknown(g, "graph", {"nodes", "edges", "family", "self_loops"});
  const int n = get<int>(require(g, "nodes", "graph.nodes"), "graph.nodes");
  if (n < 1) bad("graph.nodes", "must be >= 1");
  if (g.contains("edges") == g.contains("family")) bad("graph", "give exactly one of edges or family");

  if (g.contains("edges")) {
    if (g.contains("self_loops")) bad("graph.self_loops", "only applies to families");
    const json& list = g.at("edges");
    if (!list.is_array()) bad("graph.edges", "expected a list of [i, j] pairs");
    std::vector<Edge> edges;
    for (std::size_t k = 0; k < list.size(); ++k) {
      const std::string field = "graph.edges[" + std::to_string(k) + "]";
      const json& e = list[k];
      if (!e.is_array() || e.size() != 2) bad(field, "expected an [i, j] pair");
      edges.push_back({get<int>(e[0], field), get<int>(e[1], field)});
    }
    try {
      return DirectedGraph(n, std::move(edges));
    } catch (const InvalidArgument& e) {
      bad("graph.edges", e.what());
    }
  }

  const auto family = get<std::string>(g.at("family"), "graph.family");
  const bool loops = get_or<bool>(g, "self_loops", "graph.self_loops", protocol != Protocol::robust);
  DirectedGraph base;
  try {
    if (family == "ring") {
      base = DirectedGraph::ring(n);
    } else if (family == "ring_chord") {
      base = DirectedGraph::ring_with_chord(n);
    } else if (family == "bidirectional_ring") {
      base = DirectedGraph::bidirectional_ring(n);
    } else if (family == "complete") {
      base = DirectedGraph::complete(n);
    } else {
      bad("graph.family", "unknown family '" + family + "'");
    }
  } catch (const InvalidArgument& e) {
    bad("graph.family", e.what());
  }
  return loops ? base.with_self_loops() : base;
}

std::vector<double> parse_x0(const json& v, int n) {
  if (v.is_string()) {
    if (v.get<std::string>() != "ramp") bad("x0", "expected a list of numbers or \"ramp\"");
    std::vector<double> x(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] = i + 1.0;
    return x;
  }
  if (!v.is_array()) bad("x0", "expected a list of numbers or \"ramp\"");
  std::vector<double> x;
  for (std::size_t i = 0; i < v.size(); ++i) x.push_back(get<double>(v[i], "x0[" + std::to_string(i) + "]"));
  return x;
}

ScheduleParams parse_schedule(const json& s, Protocol protocol) {
  ScheduleParams p;
  p.regime = protocol == Protocol::ordinary  ? Regime::Kind::ordinary
             : protocol == Protocol::pushsum ? Regime::Kind::pushsum
                                             : Regime::Kind::robust;
  if (s.is_null()) return p;
  if (!s.is_object()) bad("schedule", "expected an object");
  reject_unknown(s, "schedule",
                 {"kind", "regime", "alpha", "K", "T", "block_length", "growth", "lengths",
                  "wake_probability", "failure_probability", "seed", "wake_mode", "covering"});
  if (s.contains("kind")) p.kind = enum_of(get<std::string>(s.at("kind"), "schedule.kind"), "schedule.kind", kKinds);
  if (s.contains("regime")) {
    p.regime = enum_of(get<std::string>(s.at("regime"), "schedule.regime"), "schedule.regime", kRegimes);
  }
  p.alpha = get_or<double>(s, "alpha", "schedule.alpha", p.alpha);
  p.K = get_or<long long>(s, "K", "schedule.K", p.K);
  p.T = get_or<double>(s, "T", "schedule.T", p.T);
  p.block_length = get_or<int>(s, "block_length", "schedule.block_length", p.block_length);
  p.growth = get_or<int>(s, "growth", "schedule.growth", p.growth);
  if (s.contains("lengths")) {
    const json& l = s.at("lengths");
    if (!l.is_array()) bad("schedule.lengths", "expected a list of integers");
    for (const auto& b : l) p.lengths.push_back(get<int>(b, "schedule.lengths"));
  }
  p.wake_probability = get_or<double>(s, "wake_probability", "schedule.wake_probability", p.wake_probability);
  p.failure_probability =
      get_or<double>(s, "failure_probability", "schedule.failure_probability", p.failure_probability);
  p.seed = get_or<std::uint64_t>(s, "seed", "schedule.seed", p.seed);
  if (s.contains("wake_mode")) {
    p.wake_mode = enum_of(get<std::string>(s.at("wake_mode"), "schedule.wake_mode"), "schedule.wake_mode", kWakeModes);
  }
  if (s.contains("covering")) {
    p.covering = enum_of(get<std::string>(s.at("covering"), "schedule.covering"), "schedule.covering", kCovering);
  }
  return p;
}

template <typename E, std::size_t N>
const char* name_of(E e, const std::array<std::pair<const char*, E>, N>& names) {
  for (const auto& [name, v] : names) {
    if (v == e) return name;
  }
  return "unknown";
}

// Splits "a.b.c" into a JSON pointer.
json::json_pointer pointer_of(std::string_view key) {
  std::string path;
  std::size_t start = 0;
  while (true) {
    const std::size_t dot = key.find('.', start);
    const std::string_view part = key.substr(start, dot == std::string_view::npos ? key.size() - start : dot - start);
    if (part.empty()) throw ConfigError("override '" + std::string(key) + "': empty key segment");
    path += "/";
    path += part;
    if (dot == std::string_view::npos) break;
    start = dot + 1;
  }
  return json::json_pointer(path);
}

json parse_json(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

void apply_environment(json& doc) {
  const char* env = std::getenv("PUSHSUM_SEED");
  if (env == nullptr || *env == '\0') return;
  std::uint64_t seed = 0;
  const std::string_view text(env);
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), seed);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ConfigError("PUSHSUM_SEED: expected a non-negative integer, got '" + std::string(text) + "'");
  }
  if (!doc.is_object()) return;
  doc["schedule"]["seed"] = seed;
}

}  // namespace

void apply_override(json& doc, std::string_view key_value) {
  const std::size_t eq = key_value.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    throw ConfigError("override '" + std::string(key_value) + "': expected key=value");
  }
  const std::string_view key = key_value.substr(0, eq);
  const std::string text(key_value.substr(eq + 1));
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;
  try {
    doc[pointer_of(key)] = std::move(value);
  } catch (const json::exception& e) {
    throw ConfigError("override '" + std::string(key) + "': " + e.what());
  }
}

ScenarioConfig parse_config(const json& doc) {
  if (!doc.is_object()) bad("config", "expected a JSON object");
  reject_unknown(doc, "", {"protocol", "graph", "x0", "iterations", "schedule", "tolerances", "audit_level",
                           "sampling", "weights"});
  ScenarioConfig cfg;
  cfg.protocol = enum_of(get<std::string>(require(doc, "protocol", "protocol"), "protocol"), "protocol", kProtocols);
  cfg.graph = parse_graph(require(doc, "graph", "graph"), cfg.protocol);
  cfg.x0 = parse_x0(require(doc, "x0", "x0"), cfg.graph.node_count());
  cfg.iterations = get_or<long long>(doc, "iterations", "iterations", cfg.iterations);
  cfg.schedule = parse_schedule(doc.contains("schedule") ? doc.at("schedule") : json(), cfg.protocol);
  if (doc.contains("tolerances")) {
    const json& t = doc.at("tolerances");
    if (!t.is_object()) bad("tolerances", "expected an object");
    reject_unknown(t, "tolerances", {"convergence_tol", "window", "conservation_tol"});
    cfg.tolerances.convergence =
        get_or<double>(t, "convergence_tol", "tolerances.convergence_tol", cfg.tolerances.convergence);
    cfg.tolerances.window = get_or<int>(t, "window", "tolerances.window", cfg.tolerances.window);
    cfg.tolerances.conservation =
        get_or<double>(t, "conservation_tol", "tolerances.conservation_tol", cfg.tolerances.conservation);
  }
  if (doc.contains("audit_level")) {
    cfg.audit_level = enum_of(get<std::string>(doc.at("audit_level"), "audit_level"), "audit_level", kAudit);
  }
  if (doc.contains("sampling")) {
    cfg.sampling = enum_of(get<std::string>(doc.at("sampling"), "sampling"), "sampling", kSampling);
  }
  if (doc.contains("weights")) {
    cfg.weights = enum_of(get<std::string>(doc.at("weights"), "weights"), "weights", kWeights);
  }
  return cfg;
}

static json load_text_document(std::string_view text, const std::vector<std::string>& overrides, bool use_environment) {
  json doc = parse_json(text);
  if (use_environment) apply_environment(doc);
  for (const auto& o : overrides) apply_override(doc, o);
  return doc;
}

ScenarioConfig load_config_text(std::string_view text, const std::vector<std::string>& overrides,
                                bool use_environment) {
  ScenarioConfig cfg = parse_config(load_text_document(text, overrides, use_environment));
  validate(cfg);
  return cfg;
}

json load_document(const std::string& path, const std::vector<std::string>& overrides, bool use_environment) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return load_text_document(text.str(), overrides, use_environment);
}

ScenarioConfig load_config_file(const std::string& path, const std::vector<std::string>& overrides,
                                bool use_environment) {
  ScenarioConfig cfg = parse_config(load_document(path, overrides, use_environment));
  validate(cfg);
  return cfg;
}

json to_json(const ScenarioConfig& cfg) {
  json edges = json::array();
  for (const Edge& e : cfg.graph.edges()) edges.push_back({e.from, e.to});
  const auto& s = cfg.schedule;
  json schedule = {
      {"kind", name_of(s.kind, kKinds)},
      {"regime", name_of(s.regime, kRegimes)},
      {"alpha", s.alpha},
      {"K", s.K},
      {"T", s.T},
      {"block_length", s.block_length},
      {"growth", s.growth},
      {"lengths", s.lengths},
      {"wake_probability", s.wake_probability},
      {"failure_probability", s.failure_probability},
      {"seed", s.seed},
      {"wake_mode", name_of(s.wake_mode, kWakeModes)},
  };
  if (s.covering) schedule["covering"] = name_of(*s.covering, kCovering);
  return {
      {"protocol", name_of(cfg.protocol, kProtocols)},
      {"graph", {{"nodes", cfg.graph.node_count()}, {"edges", edges}}},
      {"x0", cfg.x0},
      {"iterations", cfg.iterations},
      {"schedule", schedule},
      {"tolerances",
       {{"convergence_tol", cfg.tolerances.convergence},
        {"window", cfg.tolerances.window},
        {"conservation_tol", cfg.tolerances.conservation}}},
      {"audit_level", name_of(cfg.audit_level, kAudit)},
      {"sampling", name_of(cfg.sampling, kSampling)},
      {"weights", name_of(cfg.weights, kWeights)},
  };
}

std::string serialize_config(const ScenarioConfig& cfg) { return to_json(cfg).dump(2) + "\n"; }

}  // namespace pushsum
