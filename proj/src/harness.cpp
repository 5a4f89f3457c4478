#include "pushsum/harness.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "pushsum/consensus.hpp"
#include "pushsum/oracle.hpp"

namespace pushsum {

std::string_view protocol_name(Protocol p) {
  switch (p) {
    case Protocol::ordinary:
      return "ordinary";
    case Protocol::pushsum:
      return "pushsum";
    case Protocol::robust:
      return "robust";
  }
  return "unknown";
}

std::string_view audit_level_name(AuditLevel a) {
  switch (a) {
    case AuditLevel::none:
      return "none";
    case AuditLevel::boundaries:
      return "boundaries";
    case AuditLevel::every_iteration:
      return "every_iteration";
  }
  return "unknown";
}

std::string_view sampling_name(Sampling s) {
  switch (s) {
    case Sampling::automatic:
      return "auto";
    case Sampling::every_iteration:
      return "every_iteration";
    case Sampling::boundaries:
      return "boundaries";
  }
  return "unknown";
}

std::string_view weights_name(OrdinaryWeights w) {
  return w == OrdinaryWeights::equal ? "equal" : "symmetric";
}

std::string_view schedule_kind_name(ScheduleKind k) {
  switch (k) {
    case ScheduleKind::logarithmic:
      return "logarithmic";
    case ScheduleKind::constant:
      return "constant";
    case ScheduleKind::geometric:
      return "geometric";
    case ScheduleKind::explicit_lengths:
      return "explicit";
  }
  return "unknown";
}

AuditFailure::AuditFailure(std::string invariant, long long iteration,
                           const std::string& detail, RunResult partial)
    : Error("audit failure: " + invariant + " at iteration " + std::to_string(iteration) +
            ": " + detail),
      invariant_(std::move(invariant)),
      iteration_(iteration),
      partial_(std::move(partial)) {
  partial_.audit_failures.push_back(what());
}

// ---------------------------------------------------------------------------
// Configuration

void validate(const ScenarioConfig& cfg) {
  const int n = cfg.graph.node_count();
  if (n < 2) throw ConfigError("graph: need at least 2 nodes");
  if (cfg.iterations < 1) throw ConfigError("iterations: horizon must be >= 1");
  if (cfg.x0.size() != static_cast<std::size_t>(n)) {
    throw ConfigError("x0: length " + std::to_string(cfg.x0.size()) + " does not match " +
                      std::to_string(n) + " nodes");
  }
  for (double v : cfg.x0) {
    if (!std::isfinite(v)) throw ConfigError("x0: entries must be finite");
  }
  const auto& tol = cfg.tolerances;
  if (!(tol.convergence > 0.0)) throw ConfigError("tolerances.convergence_tol: must be > 0");
  if (!(tol.conservation > 0.0)) throw ConfigError("tolerances.conservation_tol: must be > 0");
  if (tol.window < 1) throw ConfigError("tolerances.window: must be >= 1");

  if (cfg.protocol == Protocol::robust) {
    if (cfg.graph.has_any_self_loop()) throw ConfigError("graph: robust protocol graph must not have self-loops");
  } else if (!cfg.graph.has_all_self_loops()) {
    throw ConfigError("graph: " + std::string(protocol_name(cfg.protocol)) +
                      " needs a self-loop at every node");
  }
  if (!is_strongly_connected(cfg.graph)) throw ConfigError("graph: must be strongly connected");
  if (cfg.protocol == Protocol::ordinary && cfg.weights == OrdinaryWeights::symmetric &&
      !cfg.graph.is_symmetric()) {
    throw ConfigError("weights: symmetric weights need a symmetric graph");
  }
  if (cfg.protocol == Protocol::robust && cfg.schedule.covering == CoveringMode::strongly_connected) {
    throw ConfigError("schedule.covering: robust runs need every link delivered per block");
  }

  const auto& s = cfg.schedule;
  if (!(s.wake_probability > 0.0 && s.wake_probability <= 1.0)) {
    throw ConfigError("schedule.wake_probability: must lie in (0, 1]");
  }
  if (!(s.failure_probability >= 0.0 && s.failure_probability < 1.0)) {
    throw ConfigError("schedule.failure_probability: must lie in [0, 1)");
  }
  if (s.K < 1) throw ConfigError("schedule.K: must be >= 1");
  if (!(s.T >= 0.0) || !std::isfinite(s.T)) throw ConfigError("schedule.T: must be finite and >= 0");
  if (s.regime == Regime::Kind::ordinary && s.alpha != 0.0 && !(s.alpha > 0.0 && s.alpha < 1.0)) {
    throw ConfigError("schedule.alpha: must lie in (0, 1)");
  }
  switch (s.kind) {
    case ScheduleKind::logarithmic:
      break;
    case ScheduleKind::constant:
      if (s.block_length < 1) throw ConfigError("schedule.block_length: must be >= 1");
      break;
    case ScheduleKind::geometric:
      if (s.block_length < 1) throw ConfigError("schedule.block_length: must be >= 1");
      if (s.growth < 1) throw ConfigError("schedule.growth: must be >= 1");
      break;
    case ScheduleKind::explicit_lengths:
      if (s.lengths.empty()) throw ConfigError("schedule.lengths: must not be empty");
      for (int b : s.lengths) {
        if (b < 1) throw ConfigError("schedule.lengths: entries must be >= 1");
      }
      break;
  }
}

Regime regime_of(const ScenarioConfig& cfg) {
  switch (cfg.schedule.regime) {
    case Regime::Kind::ordinary: {
      const double alpha = cfg.schedule.alpha != 0.0
                               ? cfg.schedule.alpha
                               : 1.0 / static_cast<double>(cfg.graph.node_count());
      return Regime::ordinary(alpha);
    }
    case Regime::Kind::pushsum:
      return Regime::pushsum();
    case Regime::Kind::robust:
      return Regime::robust();
  }
  return Regime::robust();
}

BlockSchedule build_schedule(const ScenarioConfig& cfg) {
  const int n = cfg.graph.node_count();
  const auto& s = cfg.schedule;
  // Grow the block count until the horizon is covered by whole windows.
  std::vector<int> lengths;
  long long covered = 0;
  auto length_at = [&](std::size_t k) -> long long {  // k is 0-based
    switch (s.kind) {
      case ScheduleKind::constant:
        return s.block_length;
      case ScheduleKind::geometric: {
        long double b = s.block_length * std::pow(static_cast<long double>(s.growth), static_cast<long double>(k));
        return static_cast<long long>(std::min<long double>(b, 1 << 24));
      }
      case ScheduleKind::explicit_lengths:
        return s.lengths[k % s.lengths.size()];
      case ScheduleKind::logarithmic:
        break;
    }
    return 1;
  };

  if (s.kind == ScheduleKind::logarithmic) {
    // Block lengths are >= 1, so horizon + n blocks always suffice.
    const auto count = static_cast<int>(cfg.iterations + n);
    auto full = logarithmic_b_sequence(n, regime_of(cfg), s.T, count);
    for (int b : full.lengths()) {
      lengths.push_back(b);
      covered += b;
      if (covered >= cfg.iterations && lengths.size() % static_cast<std::size_t>(n) == 0) break;
    }
  } else {
    while (covered < cfg.iterations || lengths.size() % static_cast<std::size_t>(n) != 0) {
      const long long b = length_at(lengths.size());
      lengths.push_back(static_cast<int>(b));
      covered += b;
    }
  }
  return BlockSchedule(std::move(lengths), n);
}

DirectedGraph link_graph(const ScenarioConfig& cfg) { return cfg.graph.without_self_loops(); }

EventTrace build_trace(const ScenarioConfig& cfg) {
  TraceOptions options;
  options.wake_probability = cfg.schedule.wake_probability;
  options.failure_probability = cfg.schedule.failure_probability;
  options.seed = cfg.schedule.seed;
  options.iterations = cfg.iterations;
  options.wake_mode = cfg.schedule.wake_mode;
  options.covering = cfg.schedule.covering.value_or(
      cfg.protocol == Protocol::robust ? CoveringMode::all_edges
                                       : CoveringMode::strongly_connected);
  try {
    return generate_trace(link_graph(cfg), build_schedule(cfg), options);
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("schedule: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Metrics and audits

ConservationResiduals audit_mass_conservation(const SystemState& state, double x0_sum, int n) {
  double sx = 0.0;
  double sy = 0.0;
  for (const auto& a : state.agents) {
    sx += a.x;
    sy += a.y;
  }
  for (const auto& b : state.buffers) {
    sx += b.u;
    sy += b.v;
  }
  return {std::abs(sx - x0_sum), std::abs(sy - static_cast<double>(n))};
}

std::optional<std::size_t> detect_convergence(std::span<const double> spreads, double tol,
                                              int window) {
  if (window < 1) throw InvalidArgument("detect_convergence needs window >= 1");
  std::size_t run = 0;
  for (std::size_t i = 0; i < spreads.size(); ++i) {
    run = spreads[i] <= tol ? run + 1 : 0;
    if (run == static_cast<std::size_t>(window)) return i + 1 - run;
  }
  if (run > 0) return spreads.size() - run;
  return std::nullopt;
}

std::optional<long long> detect_convergence(std::span<const MetricSample> samples,
                                            double tol, int window) {
  std::vector<double> spreads;
  spreads.reserve(samples.size());
  for (const auto& s : samples) spreads.push_back(s.spread_z);
  auto idx = detect_convergence(spreads, tol, window);
  if (!idx) return std::nullopt;
  return samples[*idx].iter;
}

namespace {

std::string num(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

// Iterations mu_{ln} (l = 0, 1, ...) up to the horizon.
std::vector<long long> window_boundaries(const BlockSchedule& s, long long horizon) {
  std::vector<long long> out{0};
  for (std::size_t l = 1; l <= s.window_count(); ++l) {
    const long long it = mu(s, static_cast<long long>(l) * s.n());
    if (it > horizon) break;
    out.push_back(it);
  }
  return out;
}

bool sample_every_iteration(const ScenarioConfig& cfg) {
  switch (cfg.sampling) {
    case Sampling::every_iteration:
      return true;
    case Sampling::boundaries:
      return false;
    case Sampling::automatic:
      return cfg.graph.node_count() <= 8 && cfg.iterations <= 100000;
  }
  return true;
}

double max_of(std::span<const double> v) { return *std::max_element(v.begin(), v.end()); }
double min_of(std::span<const double> v) { return *std::min_element(v.begin(), v.end()); }

// Shared bookkeeping for the three protocol loops.
class Recorder {
 public:
  Recorder(const ScenarioConfig& cfg, const BlockSchedule& schedule)
      : cfg_(cfg),
        schedule_(schedule),
        boundaries_(window_boundaries(schedule, cfg.iterations)),
        every_(sample_every_iteration(cfg)),
        n_(cfg.graph.node_count()) {
    for (double v : cfg.x0) {
      x0_sum_ += v;
      x0_scale_ += std::abs(v);
    }
    if (x0_scale_ == 0.0) x0_scale_ = 1.0;
  }

  double x0_sum() const { return x0_sum_; }
  int n() const { return n_; }

  bool is_boundary(long long it) const {
    return next_boundary_ < boundaries_.size() && boundaries_[next_boundary_] == it;
  }
  long long window() const { return static_cast<long long>(next_boundary_); }

  bool audit_step(long long it) const {
    return cfg_.audit_level == AuditLevel::every_iteration ||
           (cfg_.audit_level == AuditLevel::boundaries && is_boundary(it));
  }
  bool audit_boundary() const { return cfg_.audit_level != AuditLevel::none; }

  bool should_sample(long long it) const {
    return every_ || it == 0 || it == cfg_.iterations || is_boundary(it);
  }

  void sample(const MetricSample& s) { result_.samples.push_back(s); }

  [[noreturn]] void fail(const std::string& invariant, long long it, const std::string& detail) {
    throw AuditFailure(invariant, it, detail, result_);
  }

  void check_conservation(long long it, double sum_x, double sum_y, bool check_y) {
    const double rx = std::abs(sum_x - x0_sum_);
    const double ry = std::abs(sum_y - n_);
    if (rx > cfg_.tolerances.conservation * x0_scale_) {
      fail("mass-conservation-x", it, "residual " + num(rx));
    }
    if (check_y && ry > cfg_.tolerances.conservation * n_) {
      fail("mass-conservation-y", it, "residual " + num(ry));
    }
  }

  // Weight bounds at boundary l for the push-sum family.
  double y_lower(Protocol p, long long l) const {
    if (l == 0) return 1.0;
    const double alpha = 1.0 / n_;
    const double lam = static_cast<double>(lambda(schedule_, l));
    return p == Protocol::robust ? std::pow(alpha, lam) : std::pow(alpha, lam - 1.0);
  }
  double v_lower(long long l) const {
    if (l == 0) return 0.0;
    const double alpha = 1.0 / n_;
    return std::pow(alpha, static_cast<double>(lambda(schedule_, l) + lambda(schedule_, l - 1)));
  }

  void boundary(BoundaryRecord rec) {
    if (audit_boundary()) {
      const double up = n_ * (1.0 + 1e-9);
      if (rec.min_y < rec.y_lower * (1.0 - 1e-9) || rec.max_y > up) {
        fail("weight-bounds-y", rec.iter,
             "y in [" + num(rec.min_y) + ", " + num(rec.max_y) +
                 "], required [" + num(rec.y_lower) + ", " + std::to_string(n_) + "]");
      }
      if (rec.min_positive_v > 0.0 &&
          (rec.min_positive_v < rec.v_lower * (1.0 - 1e-9) || rec.max_v > up)) {
        fail("weight-bounds-v", rec.iter,
             "positive v in [" + num(rec.min_positive_v) + ", " +
                 num(rec.max_v) + "], required lower " + num(rec.v_lower));
      }
      if (!result_.boundaries.empty()) {
        const double prev = result_.boundaries.back().envelope;
        if (rec.envelope > prev + 1e-12 * std::max(1.0, envelope_scale_)) {
          fail("envelope-monotonicity", rec.iter,
               "envelope grew from " + num(prev) + " to " + num(rec.envelope));
        }
      }
    }
    result_.boundaries.push_back(rec);
    ++next_boundary_;
  }

  void set_envelope_scale(double s) { envelope_scale_ = std::max(envelope_scale_, s); }

  RunResult finish(std::vector<double> final_z) {
    result_.final_z = std::move(final_z);
    result_.converged_at = detect_convergence(result_.samples, cfg_.tolerances.convergence,
                                              cfg_.tolerances.window);
    return std::move(result_);
  }

 private:
  const ScenarioConfig& cfg_;
  const BlockSchedule& schedule_;
  std::vector<long long> boundaries_;
  std::size_t next_boundary_ = 0;
  bool every_;
  int n_;
  double x0_sum_ = 0.0;
  double x0_scale_ = 0.0;
  double envelope_scale_ = 0.0;
  RunResult result_;
};

RunResult run_robust(const ScenarioConfig& cfg, const BlockSchedule& schedule,
                     const EventTrace& trace, const RunHooks& hooks) {
  const DirectedGraph& g = cfg.graph;
  Recorder rec(cfg, schedule);
  SystemState state = SystemState::initial(g, cfg.x0);
  const double tol = cfg.tolerances.conservation;

  auto audit_state = [&](long long it) {
    double sx = 0.0;
    double sy = 0.0;
    for (std::size_t i = 0; i < state.agents.size(); ++i) {
      const auto& a = state.agents[i];
      if (!(a.y > 0.0)) rec.fail("positive-weight", it, "y_" + std::to_string(i) + " <= 0");
      sx += a.x;
      sy += a.y;
    }
    for (const auto& b : state.buffers) {
      const std::string name = std::to_string(b.edge.from) + "->" + std::to_string(b.edge.to);
      if (b.v < 0.0) rec.fail("buffer-nonnegative-v", it, "v of " + name + " < 0");
      if (b.v == 0.0 && b.u != 0.0) rec.fail("buffer-empty-weight", it, "u != 0 with v = 0 on " + name);
      const auto& sender = state.agents[static_cast<std::size_t>(b.edge.from)];
      const auto& receiver = state.agents[static_cast<std::size_t>(b.edge.to)];
      const std::size_t slot = receiver.slot(b.edge.from);
      const double du = std::abs(b.u - static_cast<double>(sender.sigma_x - receiver.rho_x[slot]));
      const double dv = std::abs(b.v - static_cast<double>(sender.sigma_y - receiver.rho_y[slot]));
      const double sx_mag = std::max(1.0, std::abs(static_cast<double>(sender.sigma_x)));
      const double sy_mag = std::max(1.0, static_cast<double>(sender.sigma_y));
      if (du > tol * sx_mag || dv > tol * sy_mag) {
        rec.fail("buffer-identity", it, "u/v of " + name + " differ from sigma - rho");
      }
      sx += b.u;
      sy += b.v;
    }
    rec.check_conservation(it, sx, sy, true);
  };

  auto metrics = [&](long long it, const std::vector<double>& z) {
    const auto res = audit_mass_conservation(state, rec.x0_sum(), rec.n());
    MetricSample s{it, spread(z), res.rx, res.ry, std::numeric_limits<double>::infinity(), 0.0, 0.0};
    for (const auto& a : state.agents) s.min_y = std::min(s.min_y, a.y);
    if (!state.buffers.empty()) {
      s.max_u = -std::numeric_limits<double>::infinity();
      for (const auto& b : state.buffers) {
        s.max_u = std::max(s.max_u, b.u);
        s.max_v = std::max(s.max_v, b.v);
      }
    }
    rec.sample(s);
  };

  auto boundary = [&](long long it, const std::vector<double>& z) {
    BoundaryRecord b;
    b.iter = it;
    b.window = rec.window();
    b.min_y = std::numeric_limits<double>::infinity();
    b.max_y = 0.0;
    for (const auto& a : state.agents) {
      b.min_y = std::min(b.min_y, a.y);
      b.max_y = std::max(b.max_y, a.y);
    }
    b.y_lower = rec.y_lower(Protocol::robust, b.window);
    b.v_lower = rec.v_lower(b.window);
    double hi = max_of(z);
    double lo = min_of(z);
    for (const auto& buf : state.buffers) {
      if (buf.v > 0.0) {
        b.min_positive_v = b.min_positive_v == 0.0 ? buf.v : std::min(b.min_positive_v, buf.v);
        const double r = buf.u / buf.v;
        hi = std::max(hi, r);
        lo = std::min(lo, r);
      }
      b.max_v = std::max(b.max_v, buf.v);
    }
    b.envelope = hi - lo;
    rec.set_envelope_scale(std::max(std::abs(hi), std::abs(lo)));
    rec.boundary(b);
  };

  {
    const auto z = estimate(state);
    boundary(0, z);
    metrics(0, z);
  }
  for (long long k = 0; k < cfg.iterations; ++k) {
    advance(state, trace[static_cast<std::size_t>(k)], g);
    if (hooks.after_robust_step) hooks.after_robust_step(state);
    const long long it = k + 1;
    if (rec.audit_step(it)) audit_state(it);
    const bool at_boundary = rec.is_boundary(it);
    const bool take_sample = rec.should_sample(it);
    if (!take_sample) continue;
    std::vector<double> z;
    try {
      z = estimate(state);
    } catch (const InvariantViolation& e) {
      rec.fail("positive-weight", it, e.what());
    }
    if (at_boundary) boundary(it, z);
    if (take_sample) metrics(it, z);
  }
  return rec.finish(estimate(state));
}

// Ordinary consensus and push-sum share one loop over vector state.
RunResult run_vectors(const ScenarioConfig& cfg, const BlockSchedule& schedule,
                      const EventTrace& trace, const RunHooks& hooks) {
  const bool pushsum = cfg.protocol == Protocol::pushsum;
  const bool conserves = pushsum || cfg.weights == OrdinaryWeights::symmetric;
  const auto n = static_cast<std::size_t>(cfg.graph.node_count());
  Recorder rec(cfg, schedule);
  std::vector<double> x = cfg.x0;
  std::vector<double> y(n, 1.0);

  auto estimate_z = [&]() {
    if (!pushsum) return x;
    std::vector<double> z(n);
    for (std::size_t i = 0; i < n; ++i) z[i] = x[i] / y[i];
    return z;
  };

  auto metrics = [&](long long it, const std::vector<double>& z) {
    double sx = 0.0;
    double sy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      sx += x[i];
      sy += y[i];
    }
    rec.sample(MetricSample{it, spread(z), std::abs(sx - rec.x0_sum()),
                            std::abs(sy - static_cast<double>(n)), min_of(y), 0.0, 0.0});
  };

  auto boundary = [&](long long it, const std::vector<double>& z) {
    BoundaryRecord b;
    b.iter = it;
    b.window = rec.window();
    b.min_y = min_of(y);
    b.max_y = max_of(y);
    b.y_lower = pushsum ? rec.y_lower(Protocol::pushsum, b.window) : 0.0;
    b.envelope = spread(z);
    rec.set_envelope_scale(std::max(std::abs(max_of(z)), std::abs(min_of(z))));
    rec.boundary(b);
  };

  std::vector<double> z = estimate_z();
  boundary(0, z);
  metrics(0, z);
  double hull_hi = max_of(z);
  double hull_lo = min_of(z);

  const DirectedGraph links = link_graph(cfg);
  for (long long k = 0; k < cfg.iterations; ++k) {
    const IterationEvents& ev = trace[static_cast<std::size_t>(k)];
    const long long it = k + 1;
    if (pushsum) {
      PushSumState next;
      try {
        next = push_sum_step(realized_graph(links, ev, true), x, y);
      } catch (const InvariantViolation& e) {
        rec.fail("positive-weight", it, e.what());
      }
      x = std::move(next.x);
      y = std::move(next.y);
    } else {
      const DenseMatrix a = ordinary_matrix(links, ev, cfg.weights);
      x = ordinary_step(a, x);
    }
    if (hooks.after_vector_step) hooks.after_vector_step(x, y, it);

    const bool at_boundary = rec.is_boundary(it);
    const bool take_sample = rec.should_sample(it);
    const bool need_z = take_sample || rec.audit_step(it);
    if (!need_z) continue;
    z = estimate_z();

    if (rec.audit_step(it)) {
      double sx = 0.0;
      double sy = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (pushsum && !(y[i] > 0.0)) rec.fail("positive-weight", it, "y_" + std::to_string(i) + " <= 0");
        sx += x[i];
        sy += y[i];
      }
      if (conserves) rec.check_conservation(it, sx, sy, pushsum);
      // Each new value is a convex combination of the previous ones.
      const double hi = max_of(z);
      const double lo = min_of(z);
      const double slack = 1e-12 * std::max({1.0, std::abs(hull_hi), std::abs(hull_lo)});
      if (hi > hull_hi + slack || lo < hull_lo - slack) {
        rec.fail("convex-hull", it, "estimates left [" + num(hull_lo) + ", " +
                                        num(hull_hi) + "]");
      }
      hull_hi = hi;
      hull_lo = lo;
    }
    if (at_boundary) boundary(it, z);
    if (take_sample) metrics(it, z);
  }
  return rec.finish(estimate_z());
}

}  // namespace

DenseMatrix ordinary_matrix(const DirectedGraph& links, const IterationEvents& events,
                           OrdinaryWeights weights) {
  DirectedGraph g = realized_graph(links, events, true);
  if (weights == OrdinaryWeights::equal) return equal_weight_matrix(g);
  std::vector<Edge> edges(g.edges().begin(), g.edges().end());
  for (const Edge& e : g.edges()) {
    if (!g.has_edge(e.to, e.from)) edges.push_back({e.to, e.from});
  }
  return uniform_symmetric_matrix(DirectedGraph(g.node_count(), std::move(edges)));
}

RunResult run_scenario(const ScenarioConfig& cfg, const RunHooks& hooks) {
  validate(cfg);
  const BlockSchedule schedule = build_schedule(cfg);
  const EventTrace trace = build_trace(cfg);
  if (cfg.protocol == Protocol::robust) return run_robust(cfg, schedule, trace, hooks);
  return run_vectors(cfg, schedule, trace, hooks);
}

// ---------------------------------------------------------------------------
// Divergence demo

std::vector<DirectedGraph> divergence_graphs(const BlockSchedule& schedule, long long horizon) {
  std::vector<DirectedGraph> graphs;
  graphs.reserve(static_cast<std::size_t>(std::max(horizon, 0LL)));
  const std::vector<Edge> loops{{0, 0}, {1, 1}, {2, 2}};
  auto with = [&](Edge e) {
    std::vector<Edge> edges = loops;
    edges.push_back(e);
    return DirectedGraph(3, std::move(edges));
  };
  for (std::size_t l = 0; l < schedule.block_count() && static_cast<long long>(graphs.size()) < horizon; ++l) {
    const int b = schedule.lengths()[l];
    if (b < 4) throw InvalidArgument("divergence demo blocks need length >= 4");
    const int half = b / 2;
    for (int t = 0; t < b && static_cast<long long>(graphs.size()) < horizon; ++t) {
      if (t < half - 1) {
        graphs.push_back(with({0, 1}));
      } else if (t == half - 1) {
        graphs.push_back(with({1, 0}));
      } else if (t < b - 1) {
        graphs.push_back(with({2, 1}));
      } else {
        graphs.push_back(with({1, 2}));
      }
    }
  }
  if (static_cast<long long>(graphs.size()) < horizon) {
    throw InvalidArgument("divergence demo schedule is shorter than the horizon");
  }
  return graphs;
}

RunResult divergence_demo(const ScenarioConfig& cfg) {
  if (cfg.protocol != Protocol::ordinary) throw ConfigError("protocol: divergence demo runs ordinary consensus");
  if (cfg.x0.size() != 3) throw ConfigError("x0: divergence demo uses exactly 3 nodes");
  if (cfg.iterations < 0) throw ConfigError("iterations: must be >= 0");
  const auto& s = cfg.schedule;
  if (s.kind != ScheduleKind::constant && s.kind != ScheduleKind::geometric) {
    throw ConfigError("schedule.kind: divergence demo needs constant or geometric blocks");
  }
  if (s.block_length < 4) throw ConfigError("schedule.block_length: divergence demo needs >= 4");

  RunResult result;
  if (cfg.iterations == 0) {
    result.final_z = cfg.x0;
    return result;
  }
  std::vector<int> lengths;
  long long covered = 0;
  long double b = s.block_length;
  while (covered < cfg.iterations) {
    const int len = static_cast<int>(std::min<long double>(b, 1 << 24));
    lengths.push_back(len);
    covered += len;
    if (s.kind == ScheduleKind::geometric) b *= s.growth;
  }
  const BlockSchedule schedule(std::move(lengths), 3);
  const auto graphs = divergence_graphs(schedule, cfg.iterations);

  std::vector<double> x = cfg.x0;
  double sum0 = x[0] + x[1] + x[2];
  auto sample = [&](long long it) {
    const double sum = x[0] + x[1] + x[2];
    result.samples.push_back(MetricSample{it, spread(x), std::abs(sum - sum0), 0.0, 1.0, 0.0, 0.0});
  };
  sample(0);
  for (long long k = 0; k < cfg.iterations; ++k) {
    x = ordinary_step(equal_weight_matrix(graphs[static_cast<std::size_t>(k)]), x);
    sample(k + 1);
  }
  result.final_z = x;
  result.converged_at = detect_convergence(result.samples, cfg.tolerances.convergence,
                                           cfg.tolerances.window);
  return result;
}

// ---------------------------------------------------------------------------
// Output

namespace {

void put(std::ostream& out, double v) {
  std::array<char, 32> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  out.write(buf.data(), ptr - buf.data());
}

}  // namespace

void write_csv(std::ostream& out, const RunResult& result) {
  out << "iter,spread_z,res_x,res_y,min_y,max_u,max_v\n";
  for (const MetricSample& s : result.samples) {
    out << s.iter;
    for (double v : {s.spread_z, s.res_x, s.res_y, s.min_y, s.max_u, s.max_v}) {
      out << ',';
      put(out, v);
    }
    out << '\n';
  }
}

std::string summary_record(const RunResult& result) {
  nlohmann::json j;
  j["converged_at"] = result.converged_at ? nlohmann::json(*result.converged_at) : nlohmann::json(nullptr);
  j["final_z"] = result.final_z;
  j["final_spread"] = result.final_z.empty() ? 0.0 : spread(result.final_z);
  j["samples"] = result.samples.size();
  j["boundaries"] = result.boundaries.size();
  j["audit_failures"] = result.audit_failures;
  return j.dump();
}

}  // namespace pushsum
