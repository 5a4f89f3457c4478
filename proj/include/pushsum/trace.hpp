#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pushsum/graph.hpp"
#include "pushsum/schedule.hpp"

namespace pushsum {

// How nodes wake within an iteration.
enum class WakeMode {
  independent,  // each node wakes with the wake probability; any subset
  sequential,   // exactly one node per iteration
};

// What every block of a trace must contain.
enum class CoveringMode {
  all_edges,           // every link delivers at least once per block
  strongly_connected,  // delivered links of each block form a strongly connected graph
};

std::string_view wake_mode_name(WakeMode mode);
std::string_view covering_mode_name(CoveringMode mode);

// One iteration: which nodes woke (tau_i) and which links delivered
// (tau_ij), indexed by the link graph's edge index. A link can only deliver
// when its sender is awake.
struct IterationEvents {
  std::vector<std::uint8_t> awake;
  std::vector<std::uint8_t> delivered;

  bool is_awake(NodeId i) const { return awake[static_cast<std::size_t>(i)] != 0; }
  bool is_delivered(std::size_t h) const { return delivered[h] != 0; }
  std::vector<NodeId> wake_set() const;

  friend bool operator==(const IterationEvents&, const IterationEvents&) = default;
};

// Wake-ups and link outcomes for a run over a fixed link graph (no
// self-loops). steps[k] holds the events of iteration k.
struct EventTrace {
  DirectedGraph links;
  BlockSchedule schedule;
  std::uint64_t seed = 0;
  std::vector<IterationEvents> steps;

  std::size_t size() const { return steps.size(); }
  const IterationEvents& operator[](std::size_t k) const { return steps[k]; }

  friend bool operator==(const EventTrace&, const EventTrace&) = default;
};

struct TraceOptions {
  double wake_probability = 1.0;     // in (0, 1]
  double failure_probability = 0.0;  // in [0, 1)
  std::uint64_t seed = 0;
  long long iterations = 0;
  WakeMode wake_mode = WakeMode::independent;
  CoveringMode covering = CoveringMode::all_edges;
};

// Draws wake-ups and link failures independently per iteration, then repairs
// each block: links missing from the block get one guaranteed delivery at a
// uniformly chosen iteration of the block (waking the sender there if
// needed). Deterministic in the seed.
//
// `links` must be strongly connected without self-loops and the schedule
// must cover the requested iterations. Sequential wake mode throws
// InvalidArgument when a block is too short to host every sender.
EventTrace generate_trace(const DirectedGraph& links, const BlockSchedule& schedule,
                          const TraceOptions& options);

EventTrace generate_trace(const DirectedGraph& links, const BlockSchedule& schedule,
                          double wake_probability, double failure_probability,
                          std::uint64_t seed, long long iterations);

// First violated trace invariant, or nullopt. Blocks that the trace only
// partially covers are not checked for covering.
std::optional<std::string> validate_trace(const EventTrace& trace,
                                          CoveringMode covering = CoveringMode::all_edges);

// Delivered links of one iteration, optionally with a self-loop at each node.
DirectedGraph realized_graph(const DirectedGraph& links, const IterationEvents& events,
                             bool with_self_loops);

// Line format, one iteration per line:
//   iter=<k> wake=<i,...> fail=<i->j,...>
// Links of awake nodes not listed under fail= delivered. Leading '#' lines
// carry the seed and block lengths.
std::string serialize_trace(const EventTrace& trace);

// Inverse of serialize_trace for the given link graph. Throws InvalidArgument
// on malformed input. Without a blocks header the whole trace is one block.
EventTrace parse_trace(std::string_view text, const DirectedGraph& links);

}  // namespace pushsum
