#include <doctest.h>

#include <cmath>
#include <numeric>
#include <sstream>

#include "pushsum/harness.hpp"
#include "pushsum/oracle.hpp"

using namespace pushsum;

namespace {

ScenarioConfig robust_ring(double failure, std::uint64_t seed) {
  ScenarioConfig cfg;
  cfg.protocol = Protocol::robust;
  cfg.graph = DirectedGraph::ring(5);
  cfg.x0 = {1, 2, 3, 4, 5};
  cfg.schedule.kind = ScheduleKind::constant;
  cfg.schedule.block_length = 8;
  cfg.schedule.wake_probability = 0.5;
  cfg.schedule.failure_probability = failure;
  cfg.schedule.seed = seed;
  cfg.iterations = 20000;
  return cfg;
}

}  // namespace

TEST_CASE("two mutually linked nodes reach the average") {
  ScenarioConfig cfg;
  cfg.graph = DirectedGraph(2, {{0, 1}, {1, 0}});
  cfg.x0 = {0, 2};
  cfg.iterations = 50;
  const auto r = run_scenario(cfg);
  REQUIRE(r.final_z.size() == 2);
  CHECK(std::abs(r.final_z[0] - 1) <= 1e-8);
  CHECK(std::abs(r.final_z[1] - 1) <= 1e-8);
  REQUIRE(r.converged_at.has_value());
  // Reliable and synchronous: each node keeps half and sends half.
  CHECK(*r.converged_at == 1);
}

TEST_CASE("lossy robust ring converges to the average") {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    auto cfg = robust_ring(0.5, seed);
    cfg.audit_level = AuditLevel::every_iteration;
    const auto r = run_scenario(cfg);
    REQUIRE(r.converged_at.has_value());
    for (double z : r.final_z) CHECK(std::abs(z - 3.0) <= 1e-6);
    CHECK(r.audit_failures.empty());
    // Losses really happened: some buffer held mass.
    const bool buffered = std::any_of(r.samples.begin(), r.samples.end(),
                                      [](const MetricSample& s) { return s.max_v > 0.0; });
    CHECK(buffered);
  }
}

TEST_CASE("ordinary consensus") {
  ScenarioConfig cfg;
  cfg.protocol = Protocol::ordinary;
  cfg.graph = DirectedGraph::bidirectional_ring(5).with_self_loops();
  cfg.x0 = {1, 7, -2, 4, 0.5};
  cfg.schedule.kind = ScheduleKind::constant;
  cfg.schedule.regime = Regime::Kind::ordinary;
  cfg.schedule.block_length = 3;
  cfg.schedule.wake_probability = 0.7;
  cfg.schedule.failure_probability = 0.4;
  cfg.iterations = 5000;
  cfg.audit_level = AuditLevel::every_iteration;

  SUBCASE("symmetric doubly stochastic weights keep the mean") {
    cfg.weights = OrdinaryWeights::symmetric;
    const auto r = run_scenario(cfg);
    const double mean = std::accumulate(cfg.x0.begin(), cfg.x0.end(), 0.0) / 5;
    REQUIRE(r.converged_at.has_value());
    for (double z : r.final_z) CHECK(std::abs(z - mean) <= 1e-9);
  }
  SUBCASE("equal weights reach a value inside the initial range") {
    const auto r = run_scenario(cfg);
    REQUIRE(r.converged_at.has_value());
    CHECK(spread(r.final_z) <= 1e-8);
    CHECK(r.final_z[0] >= -2.0);
    CHECK(r.final_z[0] <= 7.0);
  }
}

TEST_CASE("push-sum over time-varying graphs") {
  ScenarioConfig cfg;
  cfg.protocol = Protocol::pushsum;
  cfg.graph = DirectedGraph::complete(4).with_self_loops();
  cfg.x0 = {4, 0, 1, 3};
  cfg.schedule.kind = ScheduleKind::constant;
  cfg.schedule.regime = Regime::Kind::pushsum;
  cfg.schedule.block_length = 4;
  cfg.schedule.wake_probability = 0.5;
  cfg.schedule.failure_probability = 0.8;
  cfg.iterations = 4000;
  cfg.audit_level = AuditLevel::every_iteration;
  const auto r = run_scenario(cfg);
  REQUIRE(r.converged_at.has_value());
  for (double z : r.final_z) CHECK(std::abs(z - 2.0) <= 1e-6);
}

TEST_CASE("mass conservation residuals") {
  const DirectedGraph g = DirectedGraph::ring_with_chord(5);
  const std::vector<double> x0{1, 2, 3, 4, 5};
  SystemState s = SystemState::initial(g, x0);
  auto r0 = audit_mass_conservation(s, 15.0, 5);
  CHECK(r0.rx == 0.0);
  CHECK(r0.ry == 0.0);

  const auto reliable = generate_trace(g, constant_schedule(5, 1, 200), 1.0, 0.0, 1, 200);
  for (const auto& ev : reliable.steps) {
    advance(s, ev, g);
    const auto r = audit_mass_conservation(s, 15.0, 5);
    REQUIRE(r.rx <= 1e-12 * 5);
    REQUIRE(r.ry <= 1e-12 * 5);
  }

  SystemState lossy = SystemState::initial(g, x0);
  const auto trace = generate_trace(g, constant_schedule(5, 10, 1000), 0.5, 0.5, 2, 10000);
  double worst = 0.0;
  for (const auto& ev : trace.steps) {
    advance(lossy, ev, g);
    const auto r = audit_mass_conservation(lossy, 15.0, 5);
    worst = std::max({worst, r.rx / 15.0, r.ry / 5.0});
  }
  CHECK(worst <= 1e-9);
}

TEST_CASE("detect_convergence") {
  const std::vector<double> zeros(5, 0.0);
  CHECK(detect_convergence(zeros, 1e-8, 3) == 0u);
  const std::vector<double> falling{1, 0.1, 0.01, 1e-9, 1e-10, 1e-11, 1e-12};
  CHECK(detect_convergence(falling, 1e-8, 3) == 3u);
  const std::vector<double> wobble{1, 1e-9, 1, 1e-9, 1, 1e-9, 1};
  CHECK_FALSE(detect_convergence(wobble, 1e-8, 3).has_value());
  // A run that ends below tolerance counts even if the window is cut short.
  const std::vector<double> late{1, 1, 1e-9};
  CHECK(detect_convergence(late, 1e-8, 3) == 2u);
  CHECK_THROWS_AS(detect_convergence(zeros, 1e-8, 0), InvalidArgument);

  const std::vector<MetricSample> samples{{0, 1.0}, {10, 1e-9}, {20, 1e-9}, {30, 1e-9}};
  CHECK(detect_convergence(samples, 1e-8, 3) == 10);
}

TEST_CASE("replay determinism") {
  const auto cfg = robust_ring(0.6, 9);
  const auto a = run_scenario(cfg);
  const auto b = run_scenario(cfg);
  CHECK(a == b);
  auto other = cfg;
  other.schedule.seed = 10;
  CHECK_FALSE(run_scenario(other).samples == a.samples);
}

TEST_CASE("sampling policy") {
  auto cfg = robust_ring(0.0, 1);
  cfg.iterations = 100;
  cfg.sampling = Sampling::every_iteration;
  CHECK(run_scenario(cfg).samples.size() == 101);
  cfg.sampling = Sampling::boundaries;
  const auto r = run_scenario(cfg);
  // Windows of 5 blocks of 8 iterations: boundaries 0, 40, 80, plus the end.
  std::vector<long long> iters;
  for (const auto& s : r.samples) iters.push_back(s.iter);
  CHECK(iters == std::vector<long long>{0, 40, 80, 100});
  CHECK(r.boundaries.size() == 3);
}

TEST_CASE("audits stop the run at the violated invariant") {
  auto cfg = robust_ring(0.5, 4);
  cfg.iterations = 500;
  cfg.audit_level = AuditLevel::every_iteration;

  RunHooks leak;
  leak.after_robust_step = [](SystemState& s) {
    if (s.iteration == 37) s.agents[2].x += 1e-3;
  };
  try {
    run_scenario(cfg, leak);
    FAIL("expected an audit failure");
  } catch (const AuditFailure& e) {
    CHECK(e.invariant() == "mass-conservation-x");
    CHECK(e.iteration() == 37);
    CHECK(e.partial().samples.back().iter == 36);
    CHECK(e.partial().audit_failures.size() == 1);
  }

  RunHooks ghost;
  ghost.after_robust_step = [](SystemState& s) {
    if (s.iteration == 12) {
      // Value without weight in an empty buffer, mass taken from its sender.
      for (auto& b : s.buffers) {
        if (b.v == 0.0) {
          b.u = 0.5;
          s.agents[static_cast<std::size_t>(b.edge.from)].x -= 0.5;
          break;
        }
      }
    }
  };
  CHECK_THROWS_AS(run_scenario(cfg, ghost), AuditFailure);

  RunHooks weight;
  weight.after_robust_step = [](SystemState& s) {
    if (s.iteration == 5) s.agents[0].y = -s.agents[0].y;
  };
  CHECK_THROWS_WITH_AS(run_scenario(cfg, weight), doctest::Contains("positive-weight"), AuditFailure);

  // Boundary-level audits notice the same leak at the next window boundary.
  cfg.audit_level = AuditLevel::boundaries;
  try {
    run_scenario(cfg, leak);
    FAIL("expected an audit failure");
  } catch (const AuditFailure& e) {
    CHECK(e.iteration() == 40);
  }
  cfg.audit_level = AuditLevel::none;
  CHECK_NOTHROW(run_scenario(cfg, leak));
}

TEST_CASE("vector protocols audit conservation and the hull") {
  ScenarioConfig cfg;
  cfg.protocol = Protocol::pushsum;
  cfg.graph = DirectedGraph::ring(4).with_self_loops();
  cfg.x0 = {1, 2, 3, 4};
  cfg.iterations = 100;
  cfg.audit_level = AuditLevel::every_iteration;
  RunHooks drift;
  drift.after_vector_step = [](std::vector<double>& x, std::vector<double>&, long long it) {
    if (it == 9) x[1] += 0.01;
  };
  CHECK_THROWS_WITH_AS(run_scenario(cfg, drift), doctest::Contains("mass-conservation-x"), AuditFailure);

  cfg.protocol = Protocol::ordinary;
  RunHooks escape;
  escape.after_vector_step = [](std::vector<double>& x, std::vector<double>&, long long it) {
    if (it == 3) x[0] = 100.0;
  };
  CHECK_THROWS_WITH_AS(run_scenario(cfg, escape), doctest::Contains("convex-hull"), AuditFailure);
}

TEST_CASE("config validation names the field") {
  ScenarioConfig cfg;
  cfg.graph = DirectedGraph::ring(3);
  cfg.x0 = {1, 2};
  CHECK_THROWS_WITH_AS(validate(cfg), doctest::Contains("x0"), ConfigError);
  cfg.x0 = {1, 2, 3};
  CHECK_NOTHROW(validate(cfg));
  cfg.iterations = 0;
  CHECK_THROWS_WITH_AS(validate(cfg), doctest::Contains("iterations"), ConfigError);
  cfg.iterations = 10;
  cfg.tolerances.convergence = 0;
  CHECK_THROWS_WITH_AS(validate(cfg), doctest::Contains("convergence_tol"), ConfigError);
  cfg.tolerances.convergence = 1e-8;
  cfg.graph = DirectedGraph::ring(3).with_self_loops();
  CHECK_THROWS_WITH_AS(validate(cfg), doctest::Contains("self-loops"), ConfigError);
  cfg.protocol = Protocol::pushsum;
  CHECK_NOTHROW(validate(cfg));
  cfg.graph = DirectedGraph::ring(3);
  CHECK_THROWS_AS(validate(cfg), ConfigError);
  cfg.protocol = Protocol::robust;
  cfg.graph = DirectedGraph(3, {{0, 1}, {1, 2}});
  CHECK_THROWS_WITH_AS(validate(cfg), doctest::Contains("strongly connected"), ConfigError);
  cfg.graph = DirectedGraph::ring(3);
  cfg.schedule.failure_probability = 1.0;
  CHECK_THROWS_WITH_AS(validate(cfg), doctest::Contains("failure_probability"), ConfigError);
}

TEST_CASE("schedules cover the horizon in whole windows") {
  ScenarioConfig cfg;
  cfg.graph = DirectedGraph::ring(3);
  cfg.x0 = {1, 2, 3};
  cfg.iterations = 100;
  cfg.schedule.kind = ScheduleKind::explicit_lengths;
  cfg.schedule.lengths = {2, 5};
  const auto s = build_schedule(cfg);
  CHECK(s.total_iterations() >= 100);
  CHECK(s.block_count() % 3 == 0);
  CHECK(s.length(3) == 2);
  CHECK(s.length(4) == 5);
  cfg.schedule.kind = ScheduleKind::logarithmic;
  const auto l = build_schedule(cfg);
  CHECK(l.total_iterations() >= 100);
  CHECK(l.block_count() % 3 == 0);
}

TEST_CASE("divergence demo") {
  ScenarioConfig cfg;
  cfg.protocol = Protocol::ordinary;
  cfg.x0 = {0, 0.5, 1};
  cfg.schedule.kind = ScheduleKind::geometric;
  cfg.schedule.block_length = 4;
  cfg.schedule.growth = 2;
  cfg.iterations = 1 << 18;

  SUBCASE("fast-growing blocks leave the spread bounded away from zero") {
    const auto r = divergence_demo(cfg);
    CHECK_FALSE(r.converged_at.has_value());
    for (const auto& s : r.samples) REQUIRE(s.spread_z >= 0.5);
  }
  SUBCASE("the same pattern with short blocks converges") {
    cfg.schedule.kind = ScheduleKind::constant;
    cfg.iterations = 4000;
    const auto r = divergence_demo(cfg);
    REQUIRE(r.converged_at.has_value());
    CHECK(spread(r.final_z) <= 1e-8);
  }
  SUBCASE("horizon 0 gives an empty series") {
    cfg.iterations = 0;
    const auto r = divergence_demo(cfg);
    CHECK(r.samples.empty());
    CHECK(r.final_z == cfg.x0);
  }
  SUBCASE("graph sequence") {
    const auto gs = divergence_graphs(BlockSchedule({6}, 3), 6);
    CHECK(gs[0].has_edge(0, 1));
    CHECK(gs[1].has_edge(0, 1));
    CHECK(gs[2].has_edge(1, 0));
    CHECK(gs[3].has_edge(2, 1));
    CHECK(gs[4].has_edge(2, 1));
    CHECK(gs[5].has_edge(1, 2));
    for (const auto& g : gs) CHECK(g.has_all_self_loops());
  }
  cfg.x0 = {0, 1};
  CHECK_THROWS_AS(divergence_demo(cfg), ConfigError);
}

TEST_CASE("csv and summary output") {
  RunResult r;
  r.samples.push_back({0, 2.0, 0.0, 0.0, 1.0, 0.0, 0.0});
  r.samples.push_back({1, 0.5, 1e-17, 0.0, 0.5, 0.25, 0.125});
  r.final_z = {1.0, 1.5};
  r.converged_at = 1;
  std::ostringstream csv;
  write_csv(csv, r);
  CHECK(csv.str() ==
        "iter,spread_z,res_x,res_y,min_y,max_u,max_v\n"
        "0,2,0,0,1,0,0\n"
        "1,0.5,1e-17,0,0.5,0.25,0.125\n");
  const auto summary = summary_record(r);
  CHECK(summary.find('\n') == std::string::npos);
  CHECK(summary.find("\"converged_at\":1") != std::string::npos);
  CHECK(summary.find("\"final_spread\":0.5") != std::string::npos);
}
