#pragma once

// Robust asynchronous push-sum: push-sum with running-sum counters so that
// mass sent over a failed link is recovered on the next delivery.
//
// Each agent i keeps value mass x_i, weight mass y_i (initially 1), the
// running totals sigma_i^x, sigma_i^y of everything it has sent, and per
// in-neighbor j the last running totals rho_ij^x, rho_ij^y it received.
// On waking, i keeps 1/(d_i^+ + 1) of its mass, adds the same share to its
// running totals and broadcasts the new totals. A receiver adds the
// difference between the broadcast total and its stored copy, which
// includes every share lost on earlier failed attempts.
//
// Undelivered mass on link (i, j) is tracked as a buffer
// (u_ij, v_ij) = (sigma_i^x - rho_ji^x, sigma_i^y - rho_ji^y), so that the
// stacked vectors [x; u] and [y; v] evolve by a column-stochastic matrix
// M^k (build_M_matrix).

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pushsum/dense_matrix.hpp"
#include "pushsum/graph.hpp"
#include "pushsum/trace.hpp"

namespace pushsum {

// Running totals grow linearly with time while the shares they carry do
// not, so sigma - rho cancels most of their digits. They are kept in quad
// precision where the compiler has it so a delivery recovers the shares to
// double accuracy; an agent with small y amplifies any error left in x.
#if defined(__SIZEOF_FLOAT128__)
using Counter = __float128;
#else
using Counter = long double;
#endif

// Running totals carried by one broadcast.
struct Broadcast {
  Counter sigma_x = 0.0L;
  Counter sigma_y = 0.0L;
};

struct AgentState {
  double x = 0.0;
  double y = 1.0;
  Counter sigma_x = 0.0L;
  Counter sigma_y = 0.0L;
  std::vector<NodeId> senders;  // in-neighbors, sorted
  std::vector<Counter> rho_x;   // parallel to senders
  std::vector<Counter> rho_y;

  static AgentState initial(double x0, std::span<const NodeId> in_neighbors);

  // Position of j in senders; throws ProtocolViolation if j is not an
  // in-neighbor.
  std::size_t slot(NodeId j) const;

  friend bool operator==(const AgentState&, const AgentState&) = default;
};

// Residual mass of one link, buffer b_ij.
struct BufferState {
  Edge edge;
  double u = 0.0;
  double v = 0.0;

  friend bool operator==(const BufferState&, const BufferState&) = default;
};

struct SystemState {
  std::vector<AgentState> agents;
  std::vector<BufferState> buffers;  // indexed like the graph's edges()
  long long iteration = 0;

  // x = x0, y = 1, all counters and buffers zero.
  static SystemState initial(const DirectedGraph& g, std::span<const double> x0);

  // [x; u] and [y; v], length n + m.
  std::vector<double> phi_x() const;
  std::vector<double> phi_y() const;

  friend bool operator==(const SystemState&, const SystemState&) = default;
};

// Wake-up of an agent with d_out out-neighbors: keep 1/(d_out+1) of x and y,
// add the same shares to the running totals, return the new totals.
Broadcast wake(AgentState& agent, int d_out);
std::pair<AgentState, Broadcast> robust_wake(const AgentState& agent, int d_out);

// Delivery of `msg` from in-neighbor `sender`: x += msg.sigma_x - rho_x[sender],
// then rho_x[sender] = msg.sigma_x (same for y). Throws ProtocolViolation if
// the weight total went backwards.
void receive(AgentState& agent, NodeId sender, const Broadcast& msg);
AgentState robust_receive(const AgentState& agent, NodeId sender, const Broadcast& msg);

// One iteration. Awake nodes split their mass (shares computed from the
// state at entry), then every delivered link hands the sender's fresh totals
// to the receiver. Buffers follow
//   u_ij <- (1 - tau_i tau_ij) (u_ij + tau_i x_i / (d_i^+ + 1)).
void advance(SystemState& state, const IterationEvents& events, const DirectedGraph& g);
SystemState step_robust(const SystemState& state, const IterationEvents& events,
                        const DirectedGraph& g);

// (n+m) x (n+m) matrix with phi(k+1) = M^k phi(k):
//   M(i,i)     = 1 - tau_i + tau_i / (d_i^+ + 1)
//   M(j,i)     = tau_i tau_ij / (d_i^+ + 1)           for j in N_i^+
//   M(n+h,i)   = (1 - tau_ij) tau_i / (d_i^+ + 1)      for h = (i, j)
//   M(j,n+h)   = tau_i tau_ij                          for h = (i, j)
//   M(n+h,n+h) = 1 - tau_i tau_ij
DenseMatrix build_M_matrix(const DirectedGraph& g, const IterationEvents& events);

// Matrix mapping [z; r] at one window boundary to the next, given the
// window product W = [A B; C D] and the weights at both boundaries:
//   P = [ Y+^-1 A Y   Y+^-1 B V ]
//       [ V~+ C Y     V~+ D V   ]
// with Y = diag(y), V = diag(v) and V~ the diagonal of 1/v (0 where v = 0).
// Throws InvalidArgument on a non-positive y.
DenseMatrix build_P_matrix(const DenseMatrix& window_product,
                           std::span<const double> y_before,
                           std::span<const double> y_after,
                           std::span<const double> v_before,
                           std::span<const double> v_after);

// z_i = x_i / y_i. Throws InvariantViolation when some y_i <= 0.
std::vector<double> estimate(const SystemState& state);

// r_h = u_h / v_h, or 0 where v_h = 0.
std::vector<double> buffer_ratios(const SystemState& state);

// Full-precision text dump of every agent and buffer, for golden tests.
std::string snapshot(const SystemState& state);

}  // namespace pushsum
