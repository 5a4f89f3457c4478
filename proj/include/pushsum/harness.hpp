#pragma once

// End-to-end scenario runs: build the block schedule and event trace, drive
// one of the three protocols over it, sample metrics, audit invariants and
// detect convergence.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pushsum/error.hpp"
#include "pushsum/graph.hpp"
#include "pushsum/robust_push_sum.hpp"
#include "pushsum/schedule.hpp"
#include "pushsum/trace.hpp"

namespace pushsum {

enum class Protocol { ordinary, pushsum, robust };
enum class AuditLevel { none, boundaries, every_iteration };
// automatic: every iteration when n <= 8 and horizon <= 1e5, else at
// window boundaries mu_{kn}.
enum class Sampling { automatic, every_iteration, boundaries };
// Weights for ordinary consensus: equal_weight_matrix (row stochastic) or
// uniform_symmetric_matrix (doubly stochastic, needs a symmetric graph).
enum class OrdinaryWeights { equal, symmetric };
enum class ScheduleKind { logarithmic, constant, geometric, explicit_lengths };

struct ScheduleParams {
  ScheduleKind kind = ScheduleKind::logarithmic;
  Regime::Kind regime = Regime::Kind::robust;
  double alpha = 0.0;  // ordinary regime; 0 selects 1/n
  long long K = 1;
  double T = 0.0;
  int block_length = 1;  // constant length, or first length for geometric
  int growth = 2;        // geometric ratio
  std::vector<int> lengths;  // explicit_lengths, repeated cyclically
  double wake_probability = 1.0;
  double failure_probability = 0.0;
  std::uint64_t seed = 1;
  WakeMode wake_mode = WakeMode::independent;
  // Unset: all_edges for the robust protocol, strongly_connected otherwise.
  std::optional<CoveringMode> covering;

  friend bool operator==(const ScheduleParams&, const ScheduleParams&) = default;
};

struct Tolerances {
  double convergence = 1e-8;  // spread of z
  int window = 3;             // consecutive samples at or below `convergence`
  double conservation = 1e-9; // relative

  friend bool operator==(const Tolerances&, const Tolerances&) = default;
};

struct ScenarioConfig {
  Protocol protocol = Protocol::robust;
  // Robust: the link graph, strongly connected, no self-loops.
  // Ordinary / push-sum: base graph with a self-loop at every node; its
  // other edges are the links that may deliver.
  DirectedGraph graph;
  std::vector<double> x0;
  ScheduleParams schedule;
  long long iterations = 1000;
  Tolerances tolerances;
  AuditLevel audit_level = AuditLevel::boundaries;
  Sampling sampling = Sampling::automatic;
  OrdinaryWeights weights = OrdinaryWeights::equal;

  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

std::string_view protocol_name(Protocol p);
std::string_view audit_level_name(AuditLevel a);
std::string_view sampling_name(Sampling s);
std::string_view weights_name(OrdinaryWeights w);
std::string_view schedule_kind_name(ScheduleKind k);

// Throws ConfigError naming the offending field.
void validate(const ScenarioConfig& cfg);

// Regime object for the schedule parameters (alpha = 1/n when unset).
Regime regime_of(const ScenarioConfig& cfg);

// Enough whole n-block windows to cover the horizon.
BlockSchedule build_schedule(const ScenarioConfig& cfg);

// Link graph the trace is drawn over (graph without self-loops).
DirectedGraph link_graph(const ScenarioConfig& cfg);

EventTrace build_trace(const ScenarioConfig& cfg);

// Ordinary consensus matrix of one iteration: the delivered links plus
// self-loops, weighted equally per in-neighbor, or symmetrized (a link
// counts both ways if either direction delivered) with uniform weights.
DenseMatrix ordinary_matrix(const DirectedGraph& links, const IterationEvents& events,
                            OrdinaryWeights weights);

struct MetricSample {
  long long iter = 0;
  double spread_z = 0.0;
  double res_x = 0.0;
  double res_y = 0.0;
  double min_y = 0.0;
  double max_u = 0.0;
  double max_v = 0.0;

  friend bool operator==(const MetricSample&, const MetricSample&) = default;
};

// State at a window boundary mu_{ln} together with the weight bounds that
// must hold there.
struct BoundaryRecord {
  long long iter = 0;
  long long window = 0;  // l
  double min_y = 0.0;
  double max_y = 0.0;
  double y_lower = 0.0;       // required lower bound on y (0 if none)
  double min_positive_v = 0.0;  // 0 when every buffer is empty
  double max_v = 0.0;
  double v_lower = 0.0;       // required lower bound on positive v
  // max{z_max, r_max} - min{z_min, r_min}, r over non-empty buffers.
  double envelope = 0.0;

  friend bool operator==(const BoundaryRecord&, const BoundaryRecord&) = default;
};

struct RunResult {
  std::optional<long long> converged_at;
  std::vector<double> final_z;
  std::vector<MetricSample> samples;
  std::vector<BoundaryRecord> boundaries;
  std::vector<std::string> audit_failures;

  friend bool operator==(const RunResult&, const RunResult&) = default;
};

// Raised when an audit fails; the run stops at that iteration.
class AuditFailure : public Error {
 public:
  AuditFailure(std::string invariant, long long iteration, const std::string& detail,
               RunResult partial);

  const std::string& invariant() const { return invariant_; }
  long long iteration() const { return iteration_; }
  const RunResult& partial() const { return partial_; }

 private:
  std::string invariant_;
  long long iteration_;
  RunResult partial_;
};

// Test hooks that tamper with a run after each iteration.
struct RunHooks {
  std::function<void(SystemState&)> after_robust_step;
  std::function<void(std::vector<double>& x, std::vector<double>& y, long long iter)>
      after_vector_step;
};

// Deterministic in cfg. Throws ConfigError for an invalid config and
// AuditFailure on a violated invariant.
RunResult run_scenario(const ScenarioConfig& cfg, const RunHooks& hooks = {});

struct ConservationResiduals {
  double rx = 0.0;
  double ry = 0.0;
};

// rx = |sum x + sum u - x0_sum|, ry = |sum y + sum v - n|.
ConservationResiduals audit_mass_conservation(const SystemState& state, double x0_sum, int n);

// Index of the first sample from which the spread stays <= tol for `window`
// consecutive samples (or until the series ends).
std::optional<std::size_t> detect_convergence(std::span<const double> spreads, double tol,
                                              int window);
// Same over metric samples, returning the sample's iteration.
std::optional<long long> detect_convergence(std::span<const MetricSample> samples,
                                            double tol, int window);

// Ordinary consensus on three nodes over a sparse graph sequence: in each
// block of length b the middle node is first pulled toward node 0 for
// b/2 - 1 iterations and reports back once, then pulled toward node 2 and
// reports back once. Long blocks leave the outer nodes almost untouched.
// Uses cfg.x0 (three values), cfg.iterations and cfg.schedule
// (constant or geometric kind, lengths >= 4). Horizon 0 yields an empty run.
RunResult divergence_demo(const ScenarioConfig& cfg);

// The graph sequence divergence_demo runs over.
std::vector<DirectedGraph> divergence_graphs(const BlockSchedule& schedule, long long horizon);

// CSV header and rows: iter,spread_z,res_x,res_y,min_y,max_u,max_v
void write_csv(std::ostream& out, const RunResult& result);
// One-line JSON summary of a run.
std::string summary_record(const RunResult& result);

}  // namespace pushsum
