#include <doctest.h>

#include <random>
#include <set>

#include "pushsum/error.hpp"
#include "pushsum/trace.hpp"
#include "test_util.hpp"

using namespace pushsum;

namespace {

// Every link delivers in every complete block, checked directly.
bool covers_every_block(const EventTrace& t) {
  const auto& s = t.schedule;
  for (std::size_t l = 0; l < s.block_count(); ++l) {
    const long long lo = mu(s, static_cast<long long>(l));
    const long long hi = mu(s, static_cast<long long>(l + 1));
    if (hi > static_cast<long long>(t.size())) break;
    for (std::size_t h = 0; h < t.links.edge_count(); ++h) {
      bool hit = false;
      for (long long k = lo; k < hi; ++k) hit = hit || t[static_cast<std::size_t>(k)].is_delivered(h);
      if (!hit) return false;
    }
  }
  return true;
}

bool deliveries_need_awake_sender(const EventTrace& t) {
  for (std::size_t k = 0; k < t.size(); ++k) {
    for (std::size_t h = 0; h < t.links.edge_count(); ++h) {
      if (t[k].is_delivered(h) && !t[k].is_awake(t.links.edges()[h].from)) return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("reliable synchronous limit") {
  const auto g = DirectedGraph::ring_with_chord(5);
  const auto t = generate_trace(g, constant_schedule(5, 3, 10), 1.0, 0.0, 1, 30);
  REQUIRE(t.size() == 30);
  for (const auto& ev : t.steps) {
    for (auto a : ev.awake) CHECK(a == 1);
    for (auto d : ev.delivered) CHECK(d == 1);
  }
  CHECK_FALSE(validate_trace(t).has_value());
}

TEST_CASE("heavy failures still cover every block") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 5);
    const auto g = testutil::random_connected(rng, n, 0.3, false);
    const auto s = constant_schedule(n, 20, 40);
    const auto t = generate_trace(g, s, 0.3, 0.99, rng(), 800);
    REQUIRE(covers_every_block(t));
    REQUIRE(deliveries_need_awake_sender(t));
    REQUIRE_FALSE(validate_trace(t).has_value());
  }
}

TEST_CASE("traces are deterministic in the seed") {
  const auto g = DirectedGraph::ring_with_chord(5);
  const auto s = constant_schedule(5, 6, 20);
  const auto a = generate_trace(g, s, 0.5, 0.5, 9, 100);
  const auto b = generate_trace(g, s, 0.5, 0.5, 9, 100);
  const auto c = generate_trace(g, s, 0.5, 0.5, 10, 100);
  CHECK(a == b);
  CHECK_FALSE(a == c);
}

TEST_CASE("partial final blocks are cut at the horizon") {
  const auto g = DirectedGraph::ring(3);
  const auto t = generate_trace(g, constant_schedule(3, 10, 3), 0.5, 0.9, 4, 25);
  CHECK(t.size() == 25);
  CHECK_FALSE(validate_trace(t).has_value());
  CHECK_THROWS_AS(generate_trace(g, constant_schedule(3, 10, 3), 0.5, 0.9, 4, 31), InvalidArgument);
}

TEST_CASE("injected deliveries are spread over the block") {
  // One link that essentially never succeeds on its own: the repair picks
  // its slot uniformly among the 10 iterations of each block.
  const DirectedGraph g(2, {{0, 1}, {1, 0}});
  const int blocks = 4000;
  const auto t = generate_trace(g, constant_schedule(2, 10, blocks), 1.0, 0.999999, 5, 10LL * blocks);
  std::vector<int> counts(10);
  for (int l = 0; l < blocks; ++l) {
    for (int k = 0; k < 10; ++k) {
      if (t[static_cast<std::size_t>(10 * l + k)].is_delivered(0)) ++counts[static_cast<std::size_t>(k)];
    }
  }
  // Expected 400 per slot; chi-square with 9 degrees of freedom stays
  // below 27.9 with probability 0.999.
  double chi2 = 0.0;
  for (int c : counts) chi2 += (c - 400.0) * (c - 400.0) / 400.0;
  CHECK(chi2 < 27.9);
}

TEST_CASE("sequential wake mode") {
  const auto g = DirectedGraph::ring_with_chord(4);
  TraceOptions o;
  o.wake_mode = WakeMode::sequential;
  o.failure_probability = 0.7;
  o.seed = 12;
  o.iterations = 200;
  const auto t = generate_trace(g, constant_schedule(4, 8, 25), o);
  for (const auto& ev : t.steps) CHECK(ev.wake_set().size() == 1);
  CHECK(covers_every_block(t));
  // Four senders cannot share a block of three single-wake iterations.
  o.iterations = 30;
  CHECK_THROWS_AS(generate_trace(g, constant_schedule(4, 3, 10), o), InvalidArgument);
}

TEST_CASE("strongly connected covering") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 3 + static_cast<int>(rng() % 4);
    const auto g = testutil::random_connected(rng, n, 0.5, false);
    TraceOptions o;
    o.wake_probability = 0.5;
    o.failure_probability = 0.9;
    o.seed = rng();
    o.iterations = 300;
    o.covering = CoveringMode::strongly_connected;
    const auto t = generate_trace(g, constant_schedule(n, 5, 60), o);
    REQUIRE_FALSE(validate_trace(t, CoveringMode::strongly_connected).has_value());
    for (std::size_t l = 0; l < 60; ++l) {
      std::vector<DirectedGraph> block;
      for (std::size_t k = 5 * l; k < 5 * l + 5; ++k) block.push_back(realized_graph(g, t[k], false));
      REQUIRE(is_strongly_connected(union_graphs(block)));
    }
  }
}

TEST_CASE("validate_trace reports broken invariants") {
  const auto g = DirectedGraph::ring(3);
  auto t = generate_trace(g, constant_schedule(3, 2, 3), 1.0, 0.0, 1, 6);
  auto asleep = t;
  asleep.steps[0].awake[0] = 0;
  CHECK(validate_trace(asleep).has_value());
  auto uncovered = t;
  uncovered.steps[0].delivered[0] = 0;
  uncovered.steps[1].delivered[0] = 0;
  CHECK(validate_trace(uncovered).has_value());
  // A ring missing one link is not strongly connected either.
  CHECK(validate_trace(uncovered, CoveringMode::strongly_connected).has_value());
}

TEST_CASE("generate_trace rejects invalid inputs") {
  const auto s = constant_schedule(3, 2, 5);
  CHECK_THROWS_AS(generate_trace(DirectedGraph::ring(3).with_self_loops(), s, 1, 0, 1, 5), InvalidArgument);
  CHECK_THROWS_AS(generate_trace(DirectedGraph(3, {{0, 1}, {1, 2}}), s, 1, 0, 1, 5), InvalidArgument);
  CHECK_THROWS_AS(generate_trace(DirectedGraph::ring(3), s, 0.0, 0, 1, 5), InvalidArgument);
  CHECK_THROWS_AS(generate_trace(DirectedGraph::ring(3), s, 1.0, 1.0, 1, 5), InvalidArgument);
  CHECK_THROWS_AS(generate_trace(DirectedGraph::ring(4), s, 1.0, 0.0, 1, 5), InvalidArgument);
}

TEST_CASE("trace text format") {
  const auto g = DirectedGraph::ring(3);
  EventTrace t;
  t.links = g;
  t.schedule = BlockSchedule({2}, 3);
  t.seed = 5;
  t.steps.push_back({{1, 0, 1}, {0, 0, 1}});
  t.steps.push_back({{0, 1, 0}, {0, 1, 0}});
  const std::string text = serialize_trace(t);
  CHECK(text ==
        "# seed=5\n"
        "# blocks=2\n"
        "iter=0 wake=0,2 fail=0->1\n"
        "iter=1 wake=1 fail=\n");
  CHECK(parse_trace(text, g) == t);

  const auto generated = generate_trace(DirectedGraph::ring_with_chord(5), constant_schedule(5, 4, 10), 0.5,
                                        0.5, 3, 40);
  CHECK(parse_trace(serialize_trace(generated), generated.links) == generated);

  CHECK_THROWS_AS(parse_trace("iter=0 wake=7 fail=\n", g), InvalidArgument);
  CHECK_THROWS_AS(parse_trace("iter=0 wake=0 fail=1->2\n", g), InvalidArgument);
  CHECK_THROWS_AS(parse_trace("iter=1 wake=0 fail=\n", g), InvalidArgument);
  CHECK_THROWS_AS(parse_trace("garbage\n", g), InvalidArgument);
}
