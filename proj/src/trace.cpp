#include "pushsum/trace.hpp"

#include <algorithm>
#include <charconv>
#include <random>
#include <sstream>

#include "pushsum/error.hpp"

namespace pushsum {

std::string_view wake_mode_name(WakeMode mode) {
  return mode == WakeMode::independent ? "independent" : "sequential";
}

std::string_view covering_mode_name(CoveringMode mode) {
  return mode == CoveringMode::all_edges ? "all_edges" : "strongly_connected";
}

std::vector<NodeId> IterationEvents::wake_set() const {
  std::vector<NodeId> out;
  for (std::size_t i = 0; i < awake.size(); ++i) {
    if (awake[i]) out.push_back(static_cast<NodeId>(i));
  }
  return out;
}

namespace {

// Whether the links with mask[h] set span a strongly connected graph: node 0
// reaches everyone forward and backward.
bool masked_strongly_connected(const DirectedGraph& links, const std::vector<bool>& mask) {
  const auto n = static_cast<std::size_t>(links.node_count());
  const auto& edges = links.edges();
  for (bool forward : {true, false}) {
    std::vector<bool> seen(n, false);
    seen[0] = true;
    std::size_t count = 1;
    for (bool grew = true; grew && count < n;) {
      grew = false;
      for (std::size_t h = 0; h < edges.size(); ++h) {
        if (!mask[h]) continue;
        const auto a = static_cast<std::size_t>(forward ? edges[h].from : edges[h].to);
        const auto b = static_cast<std::size_t>(forward ? edges[h].to : edges[h].from);
        if (seen[a] && !seen[b]) {
          seen[b] = true;
          ++count;
          grew = true;
        }
      }
    }
    if (count < n) return false;
  }
  return true;
}

class BlockBuilder {
 public:
  BlockBuilder(const DirectedGraph& links, const TraceOptions& options, std::mt19937_64& rng)
      : links_(links), options_(options), rng_(rng) {}

  // Fills steps [begin, end) for one block and repairs it.
  void build(std::vector<IterationEvents>& steps, std::size_t begin, std::size_t end) {
    begin_ = begin;
    end_ = end;
    pinned_.assign(end - begin, false);
    for (std::size_t t = begin; t < end; ++t) steps[t] = draw_iteration();
    if (options_.covering == CoveringMode::all_edges) {
      cover_all(steps);
    } else {
      cover_connected(steps);
    }
  }

 private:
  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(rng_); }

  std::size_t pick(std::size_t count) {
    return std::uniform_int_distribution<std::size_t>(0, count - 1)(rng_);
  }

  void draw_links(IterationEvents& ev, NodeId sender) {
    for (std::size_t h : links_.out_edge_indices(sender)) {
      ev.delivered[h] = uniform() >= options_.failure_probability ? 1 : 0;
    }
  }

  IterationEvents draw_iteration() {
    const auto n = static_cast<std::size_t>(links_.node_count());
    IterationEvents ev{std::vector<std::uint8_t>(n, 0),
                       std::vector<std::uint8_t>(links_.edge_count(), 0)};
    if (options_.wake_mode == WakeMode::sequential) {
      ev.awake[pick(n)] = 1;
    } else {
      for (std::size_t i = 0; i < n; ++i) {
        ev.awake[i] = uniform() < options_.wake_probability ? 1 : 0;
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (ev.awake[i]) draw_links(ev, static_cast<NodeId>(i));
    }
    return ev;
  }

  std::vector<bool> covered(const std::vector<IterationEvents>& steps) const {
    std::vector<bool> seen(links_.edge_count(), false);
    for (std::size_t t = begin_; t < end_; ++t) {
      for (std::size_t h = 0; h < seen.size(); ++h) {
        if (steps[t].delivered[h]) seen[h] = true;
      }
    }
    return seen;
  }

  // Guarantees one delivery of link h inside the block.
  void inject(std::vector<IterationEvents>& steps, std::size_t h) {
    const NodeId sender = links_.edges()[h].from;
    const std::size_t length = end_ - begin_;
    if (options_.wake_mode == WakeMode::independent) {
      IterationEvents& ev = steps[begin_ + pick(length)];
      if (!ev.is_awake(sender)) {
        ev.awake[static_cast<std::size_t>(sender)] = 1;
        draw_links(ev, sender);
      }
      ev.delivered[h] = 1;
      return;
    }

    // Sequential: reuse an iteration where the sender already woke, else
    // hand an unpinned iteration over to the sender.
    std::vector<std::size_t> candidates;
    for (std::size_t t = begin_; t < end_; ++t) {
      if (steps[t].is_awake(sender)) candidates.push_back(t);
    }
    if (!candidates.empty()) {
      steps[candidates[pick(candidates.size())]].delivered[h] = 1;
      return;
    }
    for (std::size_t t = begin_; t < end_; ++t) {
      if (!pinned_[t - begin_]) candidates.push_back(t);
    }
    if (candidates.empty()) {
      throw InvalidArgument("block of length " + std::to_string(length) +
                            " is too short for sequential wake-ups to cover every link");
    }
    const std::size_t t = candidates[pick(candidates.size())];
    IterationEvents& ev = steps[t];
    std::fill(ev.awake.begin(), ev.awake.end(), 0);
    std::fill(ev.delivered.begin(), ev.delivered.end(), 0);
    ev.awake[static_cast<std::size_t>(sender)] = 1;
    draw_links(ev, sender);
    ev.delivered[h] = 1;
    pinned_[t - begin_] = true;
  }

  void cover_all(std::vector<IterationEvents>& steps) {
    for (;;) {
      const auto seen = covered(steps);
      auto missing = std::find(seen.begin(), seen.end(), false);
      if (missing == seen.end()) return;
      inject(steps, static_cast<std::size_t>(missing - seen.begin()));
    }
  }

  void cover_connected(std::vector<IterationEvents>& steps) {
    for (;;) {
      const auto seen = covered(steps);
      if (masked_strongly_connected(links_, seen)) return;
      std::vector<std::size_t> missing;
      for (std::size_t h = 0; h < seen.size(); ++h) {
        if (!seen[h]) missing.push_back(h);
      }
      inject(steps, missing[pick(missing.size())]);
    }
  }

  const DirectedGraph& links_;
  const TraceOptions& options_;
  std::mt19937_64& rng_;
  std::size_t begin_ = 0;
  std::size_t end_ = 0;
  std::vector<bool> pinned_;
};

}  // namespace

EventTrace generate_trace(const DirectedGraph& links, const BlockSchedule& schedule,
                          const TraceOptions& options) {
  if (links.node_count() < 1) throw InvalidArgument("trace over an empty graph");
  if (links.has_any_self_loop()) throw InvalidArgument("trace link graph must not have self-loops");
  if (!is_strongly_connected(links)) throw InvalidArgument("trace link graph must be strongly connected");
  if (schedule.n() != links.node_count()) {
    throw InvalidArgument("schedule n does not match the graph");
  }
  if (!(options.wake_probability > 0.0 && options.wake_probability <= 1.0)) {
    throw InvalidArgument("wake probability must lie in (0, 1]");
  }
  if (!(options.failure_probability >= 0.0 && options.failure_probability < 1.0)) {
    throw InvalidArgument("failure probability must lie in [0, 1)");
  }
  if (options.iterations < 0 || options.iterations > schedule.total_iterations()) {
    throw InvalidArgument("schedule covers " + std::to_string(schedule.total_iterations()) +
                          " iterations, " + std::to_string(options.iterations) + " requested");
  }

  EventTrace trace{links, schedule, options.seed, {}};
  if (options.iterations == 0) return trace;

  // Generate whole blocks, then drop the tail past the horizon.
  const std::size_t last_block = schedule.block_of(options.iterations - 1);
  const auto generated = static_cast<std::size_t>(mu(schedule, static_cast<long long>(last_block) + 1));
  trace.steps.resize(generated);

  std::mt19937_64 rng(options.seed);
  BlockBuilder builder(links, options, rng);
  for (std::size_t l = 0; l <= last_block; ++l) {
    builder.build(trace.steps, static_cast<std::size_t>(mu(schedule, static_cast<long long>(l))),
                  static_cast<std::size_t>(mu(schedule, static_cast<long long>(l) + 1)));
  }
  trace.steps.resize(static_cast<std::size_t>(options.iterations));
  return trace;
}

EventTrace generate_trace(const DirectedGraph& links, const BlockSchedule& schedule,
                          double wake_probability, double failure_probability,
                          std::uint64_t seed, long long iterations) {
  TraceOptions options;
  options.wake_probability = wake_probability;
  options.failure_probability = failure_probability;
  options.seed = seed;
  options.iterations = iterations;
  return generate_trace(links, schedule, options);
}

std::optional<std::string> validate_trace(const EventTrace& trace, CoveringMode covering) {
  const auto n = static_cast<std::size_t>(trace.links.node_count());
  const auto m = trace.links.edge_count();
  for (std::size_t k = 0; k < trace.size(); ++k) {
    const IterationEvents& ev = trace[k];
    if (ev.awake.size() != n || ev.delivered.size() != m) {
      return "iteration " + std::to_string(k) + ": event vectors have the wrong size";
    }
    for (std::size_t h = 0; h < m; ++h) {
      if (ev.delivered[h] && !ev.is_awake(trace.links.edges()[h].from)) {
        const Edge& e = trace.links.edges()[h];
        return "iteration " + std::to_string(k) + ": link " + std::to_string(e.from) + "->" +
               std::to_string(e.to) + " delivered while its sender slept";
      }
    }
  }

  const auto& s = trace.schedule;
  for (std::size_t l = 0; l < s.block_count(); ++l) {
    const auto begin = static_cast<std::size_t>(mu(s, static_cast<long long>(l)));
    const auto end = static_cast<std::size_t>(mu(s, static_cast<long long>(l) + 1));
    if (end > trace.size()) break;
    std::vector<bool> seen(m, false);
    for (std::size_t t = begin; t < end; ++t) {
      for (std::size_t h = 0; h < m; ++h) {
        if (trace[t].delivered[h]) seen[h] = true;
      }
    }
    if (covering == CoveringMode::all_edges) {
      auto missing = std::find(seen.begin(), seen.end(), false);
      if (missing != seen.end()) {
        const Edge& e = trace.links.edges()[static_cast<std::size_t>(missing - seen.begin())];
        return "block " + std::to_string(l + 1) + " [" + std::to_string(begin) + ", " +
               std::to_string(end) + "): link " + std::to_string(e.from) + "->" +
               std::to_string(e.to) + " never delivered";
      }
    } else {
      if (!masked_strongly_connected(trace.links, seen)) {
        return "block " + std::to_string(l + 1) + " [" + std::to_string(begin) + ", " +
               std::to_string(end) + "): delivered links are not strongly connected";
      }
    }
  }
  return std::nullopt;
}

DirectedGraph realized_graph(const DirectedGraph& links, const IterationEvents& events,
                             bool with_self_loops) {
  std::vector<Edge> edges;
  for (std::size_t h = 0; h < links.edge_count(); ++h) {
    if (events.is_delivered(h)) edges.push_back(links.edges()[h]);
  }
  if (with_self_loops) {
    for (NodeId i = 0; i < links.node_count(); ++i) {
      if (!links.has_self_loop(i)) edges.push_back({i, i});
    }
  }
  return DirectedGraph(links.node_count(), std::move(edges));
}

std::string serialize_trace(const EventTrace& trace) {
  std::ostringstream out;
  out << "# seed=" << trace.seed << "\n# blocks=";
  const auto lengths = trace.schedule.lengths();
  for (std::size_t l = 0; l < lengths.size(); ++l) out << (l ? "," : "") << lengths[l];
  out << '\n';
  for (std::size_t k = 0; k < trace.size(); ++k) {
    const IterationEvents& ev = trace[k];
    out << "iter=" << k << " wake=";
    bool first = true;
    for (NodeId i : ev.wake_set()) {
      out << (first ? "" : ",") << i;
      first = false;
    }
    out << " fail=";
    first = true;
    for (std::size_t h = 0; h < trace.links.edge_count(); ++h) {
      const Edge& e = trace.links.edges()[h];
      if (ev.is_awake(e.from) && !ev.is_delivered(h)) {
        out << (first ? "" : ",") << e.from << "->" << e.to;
        first = false;
      }
    }
    out << '\n';
  }
  return out.str();
}

namespace {

long long parse_int(std::string_view text, std::string_view what) {
  long long value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw InvalidArgument("trace: bad " + std::string(what) + " '" + std::string(text) + "'");
  }
  return value;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  if (text.empty()) return parts;
  std::size_t start = 0;
  for (;;) {
    auto pos = text.find(sep, start);
    parts.push_back(text.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

std::string_view field(std::string_view token, std::string_view key) {
  if (token.substr(0, key.size()) != key) {
    throw InvalidArgument("trace: expected '" + std::string(key) + "' in '" +
                          std::string(token) + "'");
  }
  return token.substr(key.size());
}

}  // namespace

EventTrace parse_trace(std::string_view text, const DirectedGraph& links) {
  const auto n = static_cast<std::size_t>(links.node_count());
  EventTrace trace{links, {}, 0, {}};
  std::vector<int> blocks;

  for (std::string_view line : split(text, '\n')) {
    if (line.empty()) continue;
    if (line.front() == '#') {
      auto body = line.substr(1);
      while (!body.empty() && body.front() == ' ') body.remove_prefix(1);
      if (body.starts_with("seed=")) {
        trace.seed = static_cast<std::uint64_t>(parse_int(body.substr(5), "seed"));
      } else if (body.starts_with("blocks=")) {
        for (auto b : split(body.substr(7), ',')) blocks.push_back(static_cast<int>(parse_int(b, "block length")));
      }
      continue;
    }
    const auto tokens = split(line, ' ');
    if (tokens.size() != 3) throw InvalidArgument("trace: malformed line '" + std::string(line) + "'");
    const long long k = parse_int(field(tokens[0], "iter="), "iteration");
    if (k != static_cast<long long>(trace.steps.size())) {
      throw InvalidArgument("trace: iterations out of order at " + std::to_string(k));
    }
    IterationEvents ev{std::vector<std::uint8_t>(n, 0),
                       std::vector<std::uint8_t>(links.edge_count(), 0)};
    for (auto tok : split(field(tokens[1], "wake="), ',')) {
      const long long i = parse_int(tok, "node");
      if (i < 0 || static_cast<std::size_t>(i) >= n) throw InvalidArgument("trace: node out of range");
      ev.awake[static_cast<std::size_t>(i)] = 1;
    }
    for (std::size_t h = 0; h < links.edge_count(); ++h) {
      if (ev.is_awake(links.edges()[h].from)) ev.delivered[h] = 1;
    }
    for (auto tok : split(field(tokens[2], "fail="), ',')) {
      auto arrow = tok.find("->");
      if (arrow == std::string_view::npos) throw InvalidArgument("trace: bad link '" + std::string(tok) + "'");
      const auto from = static_cast<NodeId>(parse_int(tok.substr(0, arrow), "node"));
      const auto to = static_cast<NodeId>(parse_int(tok.substr(arrow + 2), "node"));
      auto h = links.edge_index(from, to);
      if (!h) throw InvalidArgument("trace: unknown link '" + std::string(tok) + "'");
      if (!ev.is_awake(from)) throw InvalidArgument("trace: failed link from a sleeping node");
      ev.delivered[*h] = 0;
    }
    trace.steps.push_back(std::move(ev));
  }

  if (blocks.empty() && !trace.steps.empty()) blocks.push_back(static_cast<int>(trace.steps.size()));
  if (!blocks.empty()) trace.schedule = BlockSchedule(std::move(blocks), links.node_count());
  return trace;
}

}  // namespace pushsum
