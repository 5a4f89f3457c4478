#include "pushsum/verify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pushsum/consensus.hpp"
#include "pushsum/oracle.hpp"

namespace pushsum {

void CheckResult::fail(long long iteration, std::string what) {
  if (passed) {
    passed = false;
    first_failure = iteration;
    detail = std::move(what);
  }
}

bool VerificationReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

const CheckResult* VerificationReport::find(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

std::string VerificationReport::text() const {
  std::ostringstream out;
  for (const auto& c : checks) {
    out << (c.passed ? "PASS " : "FAIL ") << c.name << " (" << c.checked << " checked)";
    if (!c.passed) out << " at iteration " << *c.first_failure << ": " << c.detail;
    out << '\n';
  }
  return out.str();
}

namespace {

std::string fmt(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

// Window boundaries mu_{ln} within the horizon.
std::vector<long long> boundaries(const BlockSchedule& s, long long horizon) {
  std::vector<long long> out{0};
  for (std::size_t l = 1; l <= s.window_count(); ++l) {
    const long long it = mu(s, static_cast<long long>(l) * s.n());
    if (it > horizon) break;
    out.push_back(it);
  }
  return out;
}

// Block starts mu_l for which the n-block window [mu_l, mu_{l+n}) lies in
// the horizon.
std::vector<std::pair<long long, long long>> block_windows(const BlockSchedule& s,
                                                           long long horizon) {
  std::vector<std::pair<long long, long long>> out;
  const auto n = static_cast<std::size_t>(s.n());
  for (std::size_t l = 0; l + n <= s.block_count(); ++l) {
    const long long hi = mu(s, static_cast<long long>(l + n));
    if (hi > horizon) break;
    out.emplace_back(mu(s, static_cast<long long>(l)), hi);
  }
  return out;
}

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double e : v) m = std::max(m, std::abs(e));
  return m;
}

// Largest |a_i - b_i| and its index.
std::pair<double, std::size_t> worst_difference(std::span<const double> a,
                                                std::span<const double> b) {
  double worst = 0.0;
  std::size_t at = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = std::abs(a[i] - b[i]);
    if (d > worst || std::isnan(d)) {
      worst = d;
      at = i;
    }
  }
  return {worst, at};
}

// Positivity of an n-block product: every inspected entry
// positive and every positive entry at least alpha^(window length).
void check_window(CheckResult& check, std::span<const DenseMatrix> ms, long long lo, long long hi,
                  double alpha, std::size_t leading_rows) {
  const DenseMatrix p = product_range(ms, static_cast<int>(lo), static_cast<int>(hi - 1));
  const double bound = std::pow(alpha, static_cast<double>(hi - lo));
  ++check.checked;
  for (std::size_t r = 0; r < leading_rows; ++r) {
    for (std::size_t c = 0; c < p.cols(); ++c) {
      if (!(p(r, c) > 0.0)) {
        check.fail(lo, "window [" + std::to_string(lo) + ", " + std::to_string(hi) +
                           ") has a zero entry at (" + std::to_string(r) + ", " +
                           std::to_string(c) + ")");
        return;
      }
    }
  }
  const double min_pos = p.min_positive_entry();
  if (min_pos < bound) {
    check.fail(lo, "window [" + std::to_string(lo) + ", " + std::to_string(hi) +
                       ") min positive entry " + fmt(min_pos) + " < " + fmt(bound));
  }
}

VerificationReport verify_robust(const ScenarioConfig& cfg, const VerifyOptions& options) {
  const DirectedGraph& g = cfg.graph;
  const int n = g.node_count();
  const std::size_t nn = static_cast<std::size_t>(n);
  const std::size_t m = g.edge_count();
  const double alpha = 1.0 / n;
  const BlockSchedule schedule = build_schedule(cfg);
  const EventTrace trace = build_trace(cfg);
  const auto bounds = boundaries(schedule, cfg.iterations);
  const double scale = std::max(1.0, max_abs(cfg.x0));

  CheckResult equivalence{"oracle-equivalence"};
  CheckResult column{"M-column-stochastic"};
  CheckResult floor{"M-entry-floor"};
  CheckResult conservation{"mass-conservation"};
  CheckResult identity{"buffer-identity"};
  CheckResult empty{"buffer-empty-implies-zero"};
  CheckResult positivity{"window-positivity"};
  CheckResult weights{"weight-bounds"};
  CheckResult p_rows{"P-row-sums"};
  CheckResult p_floor{"P-entry-floor"};
  CheckResult p_map{"P-maps-ratios"};
  CheckResult envelope{"envelope-monotone"};

  int d_max = 0;
  for (NodeId i = 0; i < n; ++i) d_max = std::max(d_max, g.out_degree(i));
  const double entry_floor = 1.0 / (d_max + 1);

  double x0_sum = 0.0;
  double x0_abs = 0.0;
  for (double v : cfg.x0) {
    x0_sum += v;
    x0_abs += std::abs(v);
  }

  SystemState state = SystemState::initial(g, cfg.x0);
  std::vector<double> ox = state.phi_x();
  std::vector<double> oy = state.phi_y();
  std::vector<DenseMatrix> ms;
  ms.reserve(static_cast<std::size_t>(cfg.iterations));
  // Oracle phi at each window boundary.
  std::vector<std::vector<double>> bx{ox};
  std::vector<std::vector<double>> by{oy};
  std::size_t next_boundary = 1;

  auto check_weights = [&](long long it, std::size_t l) {
    ++weights.checked;
    const double lam = l == 0 ? 0.0 : static_cast<double>(lambda(schedule, static_cast<long long>(l)));
    const double lam_prev =
        l <= 1 ? 0.0 : static_cast<double>(lambda(schedule, static_cast<long long>(l - 1)));
    const double y_lo = std::pow(alpha, lam) * (1.0 - 1e-9);
    const double v_lo = std::pow(alpha, lam + lam_prev) * (1.0 - 1e-9);
    const double up = n * (1.0 + 1e-9);
    for (std::size_t i = 0; i < nn; ++i) {
      const double y = state.agents[i].y;
      if (y < y_lo || y > up) {
        weights.fail(it, "y_" + std::to_string(i) + " = " + fmt(y) + " outside [" + fmt(y_lo) +
                             ", " + std::to_string(n) + "]");
      }
    }
    for (const auto& b : state.buffers) {
      if (b.v > 0.0 && (b.v < v_lo || b.v > up)) {
        weights.fail(it, "v of " + std::to_string(b.edge.from) + "->" + std::to_string(b.edge.to) +
                             " = " + fmt(b.v) + " outside [" + fmt(v_lo) + ", " +
                             std::to_string(n) + "]");
      }
    }
  };

  auto envelope_of = [&](std::span<const double> x, std::span<const double> y) {
    double hi = -INFINITY;
    double lo = INFINITY;
    for (std::size_t i = 0; i < nn; ++i) {
      hi = std::max(hi, x[i] / y[i]);
      lo = std::min(lo, x[i] / y[i]);
    }
    for (std::size_t h = nn; h < x.size(); ++h) {
      if (y[h] > 0.0) {
        hi = std::max(hi, x[h] / y[h]);
        lo = std::min(lo, x[h] / y[h]);
      }
    }
    return hi - lo;
  };
  double last_envelope = envelope_of(ox, oy);
  check_weights(0, 0);

  for (long long k = 0; k < cfg.iterations; ++k) {
    const long long it = k + 1;
    const IterationEvents& ev = trace[static_cast<std::size_t>(k)];
    DenseMatrix mk = build_M_matrix(g, ev);
    if (options.misindex_buffers && m >= 2) {
      for (std::size_t r = 0; r < mk.rows(); ++r) std::swap(mk(r, nn), mk(r, nn + 1));
    }
    ++column.checked;
    if (!check_stochastic(mk, Stochasticity::column)) {
      const auto sums = mk.column_sums();
      std::size_t worst = 0;
      for (std::size_t c = 0; c < sums.size(); ++c) {
        if (std::abs(sums[c] - 1.0) > std::abs(sums[worst] - 1.0)) worst = c;
      }
      column.fail(k, "M^" + std::to_string(k) + " column " + std::to_string(worst) + " sums to " +
                         fmt(sums[worst]));
    }
    ++floor.checked;
    if (mk.min_positive_entry() < entry_floor) {
      floor.fail(k, "M^" + std::to_string(k) + " has positive entry " + fmt(mk.min_positive_entry()) +
                        " < " + fmt(entry_floor));
    }

    ox = multiply(mk, ox);
    oy = multiply(mk, oy);
    advance(state, ev, g);
    ms.push_back(std::move(mk));

    const auto sx = state.phi_x();
    const auto sy = state.phi_y();
    ++equivalence.checked;
    const auto [dx, ix] = worst_difference(sx, ox);
    const auto [dy, iy] = worst_difference(sy, oy);
    if (!(dx <= 1e-12 * scale) || !(dy <= 1e-12)) {
      equivalence.fail(it, "phi_x[" + std::to_string(ix) + "] differs by " + fmt(dx) +
                               ", phi_y[" + std::to_string(iy) + "] differs by " + fmt(dy));
    }

    ++conservation.checked;
    const auto res = audit_mass_conservation(state, x0_sum, n);
    if (res.rx > 1e-9 * std::max(1.0, x0_abs) || res.ry > 1e-9 * n) {
      conservation.fail(it, "residuals rx = " + fmt(res.rx) + ", ry = " + fmt(res.ry));
    }

    for (const auto& b : state.buffers) {
      const auto& sender = state.agents[static_cast<std::size_t>(b.edge.from)];
      const auto& receiver = state.agents[static_cast<std::size_t>(b.edge.to)];
      const std::size_t slot = receiver.slot(b.edge.from);
      const std::string name = std::to_string(b.edge.from) + "->" + std::to_string(b.edge.to);
      ++identity.checked;
      const double du = std::abs(b.u - static_cast<double>(sender.sigma_x - receiver.rho_x[slot]));
      const double dv = std::abs(b.v - static_cast<double>(sender.sigma_y - receiver.rho_y[slot]));
      const double sx_mag = std::max(1.0, std::abs(static_cast<double>(sender.sigma_x)));
      const double sy_mag = std::max(1.0, static_cast<double>(sender.sigma_y));
      if (du > 1e-9 * sx_mag || dv > 1e-9 * sy_mag) {
        identity.fail(it, "buffer " + name + " differs from sigma - rho by " + fmt(std::max(du, dv)));
      }
      ++empty.checked;
      if (b.v < 0.0 || (b.v == 0.0 && b.u != 0.0)) {
        empty.fail(it, "buffer " + name + " has u = " + fmt(b.u) + ", v = " + fmt(b.v));
      }
    }

    if (next_boundary < bounds.size() && bounds[next_boundary] == it) {
      check_weights(it, next_boundary);
      bx.push_back(ox);
      by.push_back(oy);
      ++envelope.checked;
      const double e = envelope_of(ox, oy);
      if (e > last_envelope + 1e-12 * scale) {
        envelope.fail(it, "envelope grew from " + fmt(last_envelope) + " to " + fmt(e));
      }
      last_envelope = e;
      ++next_boundary;
    }
  }

  for (const auto& [lo, hi] : block_windows(schedule, cfg.iterations)) {
    check_window(positivity, ms, lo, hi, alpha, nn);
  }

  // P^k over window k: boundaries mu_{kn} -> mu_{(k+1)n}.
  for (std::size_t w = 0; w + 1 < bx.size(); ++w) {
    const long long lo = bounds[w];
    const long long hi = bounds[w + 1];
    const DenseMatrix wk = product_range(ms, static_cast<int>(lo), static_cast<int>(hi - 1));
    const std::span<const double> yb(by[w].data(), nn);
    const std::span<const double> ya(by[w + 1].data(), nn);
    const std::span<const double> vb(by[w].data() + nn, m);
    const std::span<const double> va(by[w + 1].data() + nn, m);
    const DenseMatrix p = build_P_matrix(wk, yb, ya, vb, va);

    ++p_rows.checked;
    const auto sums = p.row_sums();
    for (std::size_t r = 0; r < sums.size(); ++r) {
      const bool zero_row = r >= nn && va[r - nn] == 0.0;
      const bool ok = zero_row ? std::all_of(p.row(r).begin(), p.row(r).end(),
                                             [](double e) { return e == 0.0; })
                               : std::abs(sums[r] - 1.0) <= 1e-9;
      if (!ok) {
        p_rows.fail(hi, "row " + std::to_string(r) + " of P^" + std::to_string(w) + " sums to " +
                            fmt(sums[r]));
        break;
      }
    }

    ++p_floor.checked;
    const auto k = static_cast<long long>(w);
    auto lam = [&](long long j) { return j < 1 ? 0.0 : static_cast<double>(lambda(schedule, j)); };
    const double beta = std::pow(alpha, lam(k + 1) + lam(k) + lam(k - 1) + 1.0);
    if (p.min_positive_entry() < beta * (1.0 - 1e-9)) {
      p_floor.fail(hi, "P^" + std::to_string(w) + " has positive entry " +
                           fmt(p.min_positive_entry()) + " < beta = " + fmt(beta));
    }

    ++p_map.checked;
    auto ratios = [&](const std::vector<double>& x, const std::vector<double>& y) {
      std::vector<double> r(x.size(), 0.0);
      for (std::size_t i = 0; i < x.size(); ++i) r[i] = y[i] > 0.0 ? x[i] / y[i] : 0.0;
      return r;
    };
    const auto mapped = multiply(p, ratios(bx[w], by[w]));
    const auto [d, at] = worst_difference(mapped, ratios(bx[w + 1], by[w + 1]));
    if (!(d <= 1e-9 * scale)) {
      p_map.fail(hi, "P^" + std::to_string(w) + " maps ratio " + std::to_string(at) + " off by " + fmt(d));
    }
  }

  return {{equivalence, column, floor, conservation, identity, empty, positivity, weights, p_rows,
           p_floor, p_map, envelope}};
}

VerificationReport verify_vectors(const ScenarioConfig& cfg) {
  const bool pushsum = cfg.protocol == Protocol::pushsum;
  const int n = cfg.graph.node_count();
  const std::size_t nn = static_cast<std::size_t>(n);
  const double alpha = 1.0 / n;
  const BlockSchedule schedule = build_schedule(cfg);
  const EventTrace trace = build_trace(cfg);
  const DirectedGraph links = link_graph(cfg);
  const auto bounds = boundaries(schedule, cfg.iterations);
  const double scale = std::max(1.0, max_abs(cfg.x0));

  CheckResult equivalence{"oracle-equivalence"};
  CheckResult stochastic{pushsum ? "W-column-stochastic" : "A-row-stochastic"};
  CheckResult floor{pushsum ? "W-entry-floor" : "A-entry-floor"};
  CheckResult positivity{"block-positivity"};
  CheckResult weights{"weight-bounds"};
  CheckResult hull{"estimate-hull"};

  std::vector<double> x = cfg.x0;
  std::vector<double> y(nn, 1.0);
  std::vector<double> ox = x;
  std::vector<double> oy = y;
  std::vector<DenseMatrix> ms;
  ms.reserve(static_cast<std::size_t>(cfg.iterations));
  std::size_t next_boundary = 1;

  auto z_of = [&]() {
    std::vector<double> z(nn);
    for (std::size_t i = 0; i < nn; ++i) z[i] = x[i] / y[i];
    return z;
  };
  std::vector<double> last_z = z_of();

  for (long long k = 0; k < cfg.iterations; ++k) {
    const long long it = k + 1;
    const IterationEvents& ev = trace[static_cast<std::size_t>(k)];
    DenseMatrix a = pushsum ? build_pushsum_matrix(realized_graph(links, ev, true))
                            : ordinary_matrix(links, ev, cfg.weights);
    ++stochastic.checked;
    if (!check_stochastic(a, pushsum ? Stochasticity::column : Stochasticity::row)) {
      stochastic.fail(k, "matrix of iteration " + std::to_string(k) + " is not stochastic");
    }
    ++floor.checked;
    if (a.min_positive_entry() < alpha * (1.0 - 1e-12)) {
      floor.fail(k, "positive entry " + fmt(a.min_positive_entry()) + " < 1/n");
    }

    ox = multiply(a, ox);
    if (pushsum) {
      oy = multiply(a, oy);
      auto next = push_sum_step(realized_graph(links, ev, true), x, y);
      x = std::move(next.x);
      y = std::move(next.y);
      ++equivalence.checked;
      const auto [dx, ix] = worst_difference(x, ox);
      const auto [dy, iy] = worst_difference(y, oy);
      if (!(dx <= 1e-12 * scale) || !(dy <= 1e-12)) {
        equivalence.fail(it, "x[" + std::to_string(ix) + "] differs by " + fmt(dx) + ", y[" +
                                 std::to_string(iy) + "] differs by " + fmt(dy));
      }
    } else {
      x = ordinary_step(a, x);
    }
    ms.push_back(std::move(a));

    if (next_boundary < bounds.size() && bounds[next_boundary] == it) {
      if (pushsum) {
        ++weights.checked;
        const double lam = static_cast<double>(lambda(schedule, static_cast<long long>(next_boundary)));
        const double lo = std::pow(alpha, lam - 1.0) * (1.0 - 1e-9);
        for (std::size_t i = 0; i < nn; ++i) {
          if (y[i] < lo || y[i] > n * (1.0 + 1e-9)) {
            weights.fail(it, "y_" + std::to_string(i) + " = " + fmt(y[i]) + " outside [" +
                                 fmt(lo) + ", " + std::to_string(n) + "]");
          }
        }
      }
      ++hull.checked;
      const auto z = z_of();
      const double hi = *std::max_element(last_z.begin(), last_z.end());
      const double lo = *std::min_element(last_z.begin(), last_z.end());
      const double slack = 1e-12 * scale;
      for (std::size_t i = 0; i < nn; ++i) {
        if (z[i] > hi + slack || z[i] < lo - slack) {
          hull.fail(it, "z_" + std::to_string(i) + " = " + fmt(z[i]) + " left [" + fmt(lo) + ", " +
                            fmt(hi) + "]");
        }
      }
      last_z = z;
      ++next_boundary;
    }
  }

  for (const auto& [lo, hi] : block_windows(schedule, cfg.iterations)) {
    check_window(positivity, ms, lo, hi, alpha, nn);
  }

  if (pushsum) return {{equivalence, stochastic, floor, positivity, weights, hull}};
  return {{stochastic, floor, positivity, hull}};
}

}  // namespace

VerificationReport verify_scenario(const ScenarioConfig& cfg, const VerifyOptions& options) {
  validate(cfg);
  if (cfg.graph.node_count() > kVerifyMaxNodes) {
    throw ConfigError("graph: verify supports at most " + std::to_string(kVerifyMaxNodes) +
                      " nodes");
  }
  if (cfg.protocol == Protocol::robust) return verify_robust(cfg, options);
  return verify_vectors(cfg);
}

}  // namespace pushsum
