#include <doctest.h>

#include <numeric>
#include <random>

#include "pushsum/consensus.hpp"
#include "pushsum/error.hpp"
#include "pushsum/oracle.hpp"
#include "test_util.hpp"

using namespace pushsum;

TEST_CASE("ordinary_step examples") {
  const std::vector<double> x{1, 2, 3};
  CHECK(ordinary_step(DenseMatrix::identity(3), x) == x);
  CHECK(ordinary_step(DenseMatrix{{0.5, 0.5}, {0.5, 0.5}}, std::vector<double>{0, 2}) ==
        std::vector<double>{1, 1});
  CHECK_THROWS_AS(ordinary_step(DenseMatrix{{0.5, 0.4}, {0.5, 0.5}}, std::vector<double>{0, 2}),
                  InvalidArgument);
  CHECK_THROWS_AS(ordinary_step(DenseMatrix::identity(2), x), InvalidArgument);

  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-5, 5);
  for (int t = 0; t < 100; ++t) {
    const auto g = testutil::random_graph(rng, 5, 0.4, true);
    std::vector<Edge> sym(g.edges().begin(), g.edges().end());
    for (const Edge& e : g.edges()) {
      if (!g.has_edge(e.to, e.from)) sym.push_back({e.to, e.from});
    }
    const auto a = uniform_symmetric_matrix(DirectedGraph(5, sym));
    std::vector<double> v(5);
    for (auto& e : v) e = u(rng);
    const auto w = ordinary_step(a, v);
    CHECK(std::accumulate(w.begin(), w.end(), 0.0) ==
          doctest::Approx(std::accumulate(v.begin(), v.end(), 0.0)).epsilon(1e-12));
  }
}

TEST_CASE("equal_weight_matrix examples") {
  CHECK(equal_weight_matrix(DirectedGraph::empty(3).with_self_loops()) == DenseMatrix::identity(3));
  CHECK(equal_weight_matrix(DirectedGraph::complete(2).with_self_loops()) ==
        DenseMatrix{{0.5, 0.5}, {0.5, 0.5}});
  const auto ring = equal_weight_matrix(DirectedGraph::ring(3).with_self_loops());
  // Node i hears itself and i - 1.
  CHECK(ring == DenseMatrix{{0.5, 0, 0.5}, {0.5, 0.5, 0}, {0, 0.5, 0.5}});
  CHECK_THROWS_AS(equal_weight_matrix(DirectedGraph::ring(3)), InvalidArgument);
}

TEST_CASE("uniform_symmetric_matrix") {
  const auto a = uniform_symmetric_matrix(DirectedGraph::bidirectional_ring(4).with_self_loops());
  CHECK(a == DenseMatrix{{0.5, 0.25, 0, 0.25}, {0.25, 0.5, 0.25, 0}, {0, 0.25, 0.5, 0.25}, {0.25, 0, 0.25, 0.5}});
  CHECK_THROWS_AS(uniform_symmetric_matrix(DirectedGraph::ring(4).with_self_loops()), InvalidArgument);
}

TEST_CASE("build_pushsum_matrix") {
  CHECK(build_pushsum_matrix(DirectedGraph::empty(3).with_self_loops()) == DenseMatrix::identity(3));
  CHECK(build_pushsum_matrix(DirectedGraph::complete(2).with_self_loops()) ==
        DenseMatrix{{0.5, 0.5}, {0.5, 0.5}});
  // Node 0 sends to itself, 1 and 2; nodes 1 and 2 keep everything.
  const auto star = build_pushsum_matrix(DirectedGraph(3, {{0, 1}, {0, 2}}).with_self_loops());
  CHECK(star == DenseMatrix{{1.0 / 3, 0, 0}, {1.0 / 3, 1, 0}, {1.0 / 3, 0, 1}});
  std::mt19937_64 rng(2);
  for (int t = 0; t < 200; ++t) {
    const auto w = build_pushsum_matrix(testutil::random_graph(rng, 6, 0.3, true));
    REQUIRE(check_stochastic(w, Stochasticity::column));
    REQUIRE(w.min_positive_entry() >= 1.0 / 6);
  }
  CHECK_THROWS_AS(build_pushsum_matrix(DirectedGraph::ring(3)), InvalidArgument);
}

TEST_CASE("push_sum_step examples") {
  const auto full = push_sum_step(DirectedGraph::complete(2).with_self_loops(), std::vector<double>{0, 2},
                                  std::vector<double>{1, 1});
  CHECK(full.x == std::vector<double>{1, 1});
  CHECK(full.y == std::vector<double>{1, 1});
  CHECK(full.z == std::vector<double>{1, 1});

  const std::vector<double> x{3, -1, 2};
  const std::vector<double> y{1, 0.5, 2};
  const auto idle = push_sum_step(DirectedGraph::empty(3).with_self_loops(), x, y);
  CHECK(idle.x == x);
  CHECK(idle.y == y);

  CHECK_THROWS_AS(push_sum_step(DirectedGraph::empty(2).with_self_loops(), std::vector<double>{1, 1},
                                std::vector<double>{1, 0}),
                  InvalidArgument);
}

TEST_CASE("push_sum_step equals W times the state") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.1, 3);
  for (int t = 0; t < 200; ++t) {
    const auto g = testutil::random_graph(rng, 5, 0.4, true);
    std::vector<double> x(5);
    std::vector<double> y(5);
    for (auto& e : x) e = u(rng);
    for (auto& e : y) e = u(rng);
    const auto step = push_sum_step(g, x, y);
    const auto w = build_pushsum_matrix(g);
    const auto wx = multiply(w, x);
    const auto wy = multiply(w, y);
    for (std::size_t i = 0; i < 5; ++i) {
      CHECK(step.x[i] == doctest::Approx(wx[i]).epsilon(1e-14));
      CHECK(step.y[i] == doctest::Approx(wy[i]).epsilon(1e-14));
      CHECK(step.z[i] == step.x[i] / step.y[i]);
    }
  }
}

TEST_CASE("push-sum on a 3-node ring reaches the average") {
  const auto g = DirectedGraph::ring(3).with_self_loops();
  std::vector<double> x{3, 0, 0};
  std::vector<double> y{1, 1, 1};
  // Oracle: z_i = (W^k x0)_i / (W^k 1)_i.
  const auto w = build_pushsum_matrix(g);
  DenseMatrix power = DenseMatrix::identity(3);
  int reached = -1;
  for (int k = 1; k <= 200; ++k) {
    auto s = push_sum_step(g, x, y);
    x = s.x;
    y = s.y;
    power = multiply(w, power);
    const auto ox = multiply(power, std::vector<double>{3, 0, 0});
    const auto oy = multiply(power, std::vector<double>{1, 1, 1});
    for (std::size_t i = 0; i < 3; ++i) REQUIRE(s.z[i] == doctest::Approx(ox[i] / oy[i]).epsilon(1e-12));
    if (reached < 0 && spread(s.z) < 1e-6) reached = k;
  }
  CHECK(reached > 0);
  for (std::size_t i = 0; i < 3; ++i) CHECK(x[i] / y[i] == doctest::Approx(1.0).epsilon(1e-12));
}
