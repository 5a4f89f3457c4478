#include "pushsum/robust_push_sum.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <string>
#include <type_traits>

#include "pushsum/error.hpp"

namespace pushsum {

AgentState AgentState::initial(double x0, std::span<const NodeId> in_neighbors) {
  AgentState a;
  a.x = x0;
  a.senders.assign(in_neighbors.begin(), in_neighbors.end());
  a.rho_x.assign(a.senders.size(), 0.0L);
  a.rho_y.assign(a.senders.size(), 0.0L);
  return a;
}

std::size_t AgentState::slot(NodeId j) const {
  auto it = std::lower_bound(senders.begin(), senders.end(), j);
  if (it == senders.end() || *it != j) {
    throw ProtocolViolation("message from node " + std::to_string(j) +
                            ", which is not an in-neighbor");
  }
  return static_cast<std::size_t>(it - senders.begin());
}

SystemState SystemState::initial(const DirectedGraph& g, std::span<const double> x0) {
  if (x0.size() != static_cast<std::size_t>(g.node_count())) {
    throw InvalidArgument("initial state: x0 has " + std::to_string(x0.size()) +
                          " entries for " + std::to_string(g.node_count()) + " nodes");
  }
  if (g.has_any_self_loop()) throw InvalidArgument("robust protocol graph must not have self-loops");
  SystemState s;
  for (NodeId i = 0; i < g.node_count(); ++i) {
    s.agents.push_back(AgentState::initial(x0[static_cast<std::size_t>(i)], g.in_neighbors(i)));
  }
  for (const Edge& e : g.edges()) s.buffers.push_back(BufferState{e, 0.0, 0.0});
  return s;
}

std::vector<double> SystemState::phi_x() const {
  std::vector<double> phi;
  phi.reserve(agents.size() + buffers.size());
  for (const auto& a : agents) phi.push_back(a.x);
  for (const auto& b : buffers) phi.push_back(b.u);
  return phi;
}

std::vector<double> SystemState::phi_y() const {
  std::vector<double> phi;
  phi.reserve(agents.size() + buffers.size());
  for (const auto& a : agents) phi.push_back(a.y);
  for (const auto& b : buffers) phi.push_back(b.v);
  return phi;
}

Broadcast wake(AgentState& agent, int d_out) {
  if (d_out < 1) throw InvalidArgument("wake: node has no out-neighbors");
  const double parts = static_cast<double>(d_out) + 1.0;
  const double share_x = agent.x / parts;
  const double share_y = agent.y / parts;
  agent.sigma_x += share_x;
  agent.sigma_y += share_y;
  agent.x = share_x;
  agent.y = share_y;
  return Broadcast{agent.sigma_x, agent.sigma_y};
}

std::pair<AgentState, Broadcast> robust_wake(const AgentState& agent, int d_out) {
  AgentState next = agent;
  Broadcast msg = wake(next, d_out);
  return {std::move(next), msg};
}

void receive(AgentState& agent, NodeId sender, const Broadcast& msg) {
  const std::size_t s = agent.slot(sender);
  // Weight shares are positive, so the weight total only grows. The value
  // total may shrink when values are negative.
  if (msg.sigma_y < agent.rho_y[s]) {
    throw ProtocolViolation("weight total from node " + std::to_string(sender) +
                            " went backwards");
  }
  agent.x += static_cast<double>(msg.sigma_x - agent.rho_x[s]);
  agent.y += static_cast<double>(msg.sigma_y - agent.rho_y[s]);
  agent.rho_x[s] = msg.sigma_x;
  agent.rho_y[s] = msg.sigma_y;
}

AgentState robust_receive(const AgentState& agent, NodeId sender, const Broadcast& msg) {
  AgentState next = agent;
  receive(next, sender, msg);
  return next;
}

namespace {

void check_events(const IterationEvents& events, const DirectedGraph& g) {
  if (events.awake.size() != static_cast<std::size_t>(g.node_count()) ||
      events.delivered.size() != g.edge_count()) {
    throw InvalidArgument("iteration events do not match the graph");
  }
  for (std::size_t h = 0; h < g.edge_count(); ++h) {
    if (events.is_delivered(h) && !events.is_awake(g.edges()[h].from)) {
      throw InvalidArgument("link delivered while its sender slept");
    }
  }
}

}  // namespace

void advance(SystemState& state, const IterationEvents& events, const DirectedGraph& g) {
  check_events(events, g);
  const auto n = static_cast<std::size_t>(g.node_count());
  if (state.agents.size() != n || state.buffers.size() != g.edge_count()) {
    throw InvalidArgument("state does not match the graph");
  }

  std::vector<Broadcast> sent(n);
  for (NodeId i = 0; i < g.node_count(); ++i) {
    if (!events.is_awake(i)) continue;
    AgentState& a = state.agents[static_cast<std::size_t>(i)];
    const double parts = static_cast<double>(g.out_degree(i)) + 1.0;
    const double share_x = a.x / parts;
    const double share_y = a.y / parts;
    sent[static_cast<std::size_t>(i)] = wake(a, g.out_degree(i));
    for (std::size_t h : g.out_edge_indices(i)) {
      BufferState& b = state.buffers[h];
      if (events.is_delivered(h)) {
        b.u = 0.0;
        b.v = 0.0;
      } else {
        b.u += share_x;
        b.v += share_y;
      }
    }
  }

  for (std::size_t h = 0; h < g.edge_count(); ++h) {
    if (!events.is_delivered(h)) continue;
    const Edge& e = g.edges()[h];
    receive(state.agents[static_cast<std::size_t>(e.to)], e.from,
            sent[static_cast<std::size_t>(e.from)]);
  }
  ++state.iteration;
}

SystemState step_robust(const SystemState& state, const IterationEvents& events,
                        const DirectedGraph& g) {
  SystemState next = state;
  advance(next, events, g);
  return next;
}

DenseMatrix build_M_matrix(const DirectedGraph& g, const IterationEvents& events) {
  check_events(events, g);
  const auto n = static_cast<std::size_t>(g.node_count());
  const auto m = g.edge_count();
  DenseMatrix M(n + m, n + m);
  for (NodeId i = 0; i < g.node_count(); ++i) {
    const auto ui = static_cast<std::size_t>(i);
    const double tau_i = events.is_awake(i) ? 1.0 : 0.0;
    const double share = 1.0 / (static_cast<double>(g.out_degree(i)) + 1.0);
    M(ui, ui) = 1.0 - tau_i + tau_i * share;
    for (std::size_t h : g.out_edge_indices(i)) {
      const auto j = static_cast<std::size_t>(g.edges()[h].to);
      const double tau_ij = events.is_delivered(h) ? 1.0 : 0.0;
      M(j, ui) = tau_i * tau_ij * share;
      M(n + h, ui) = (1.0 - tau_ij) * tau_i * share;
      M(j, n + h) = tau_i * tau_ij;
      M(n + h, n + h) = 1.0 - tau_i * tau_ij;
    }
  }
  return M;
}

DenseMatrix build_P_matrix(const DenseMatrix& window_product,
                           std::span<const double> y_before,
                           std::span<const double> y_after,
                           std::span<const double> v_before,
                           std::span<const double> v_after) {
  const std::size_t n = y_before.size();
  const std::size_t m = v_before.size();
  if (y_after.size() != n || v_after.size() != m || window_product.rows() != n + m ||
      window_product.cols() != n + m) {
    throw InvalidArgument("build_P_matrix: dimension mismatch");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!(y_before[i] > 0.0) || !(y_after[i] > 0.0)) {
      throw InvalidArgument("build_P_matrix: y must be strictly positive");
    }
  }
  // Column scaling (Y or V) and row scaling (Y+^-1 or V~+).
  std::vector<double> col_scale(n + m);
  std::vector<double> row_scale(n + m);
  for (std::size_t i = 0; i < n; ++i) {
    col_scale[i] = y_before[i];
    row_scale[i] = 1.0 / y_after[i];
  }
  for (std::size_t h = 0; h < m; ++h) {
    col_scale[n + h] = v_before[h];
    row_scale[n + h] = v_after[h] != 0.0 ? 1.0 / v_after[h] : 0.0;
  }
  DenseMatrix P(n + m, n + m);
  for (std::size_t r = 0; r < n + m; ++r) {
    for (std::size_t c = 0; c < n + m; ++c) {
      P(r, c) = row_scale[r] * window_product(r, c) * col_scale[c];
    }
  }
  return P;
}

std::vector<double> estimate(const SystemState& state) {
  std::vector<double> z;
  z.reserve(state.agents.size());
  for (std::size_t i = 0; i < state.agents.size(); ++i) {
    const AgentState& a = state.agents[i];
    if (!(a.y > 0.0)) {
      throw InvariantViolation("agent " + std::to_string(i) + " has non-positive weight y = " +
                               std::to_string(a.y) + " at iteration " +
                               std::to_string(state.iteration));
    }
    z.push_back(a.x / a.y);
  }
  return z;
}

std::vector<double> buffer_ratios(const SystemState& state) {
  std::vector<double> r;
  r.reserve(state.buffers.size());
  for (const auto& b : state.buffers) r.push_back(b.v != 0.0 ? b.u / b.v : 0.0);
  return r;
}

namespace {

template <typename T>
void put(std::string& out, T v) {
  std::array<char, 64> buf{};
  char* ptr = nullptr;
  if constexpr (std::is_same_v<T, double> || std::is_same_v<T, long double>) {
    ptr = std::to_chars(buf.data(), buf.data() + buf.size(), v).ptr;
  } else {
    // No to_chars for quad; its long double rounding is plenty for a dump.
    ptr = std::to_chars(buf.data(), buf.data() + buf.size(), static_cast<long double>(v)).ptr;
  }
  out.append(buf.data(), ptr);
}

}  // namespace

std::string snapshot(const SystemState& state) {
  std::string out = "iteration=" + std::to_string(state.iteration) + "\n";
  for (std::size_t i = 0; i < state.agents.size(); ++i) {
    const AgentState& a = state.agents[i];
    out += "agent " + std::to_string(i) + " x=";
    put(out, a.x);
    out += " y=";
    put(out, a.y);
    out += " sigma_x=";
    put(out, a.sigma_x);
    out += " sigma_y=";
    put(out, a.sigma_y);
    out += '\n';
  }
  for (const BufferState& b : state.buffers) {
    out += "buffer " + std::to_string(b.edge.from) + "->" + std::to_string(b.edge.to) + " u=";
    put(out, b.u);
    out += " v=";
    put(out, b.v);
    out += '\n';
  }
  return out;
}

}  // namespace pushsum
