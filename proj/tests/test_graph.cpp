#include <algorithm>
#include <sstream>

#include "doctest.h"
#include "hardcore/graph.hpp"

using namespace hardcore;

namespace {

// Independent girth oracle: drop each edge and measure the detour.
int girth_by_edge_removal(const Graph& g) {
  int best = 0;
  for (auto [u, v] : g.edges()) {
    std::vector<Edge> rest;
    for (auto e : g.edges()) {
      if (e != Edge{u, v}) rest.push_back(e);
    }
    const int d = distance(Graph::from_edges(g.size(), rest), u, v);
    if (d > 0 && (best == 0 || d + 1 < best)) best = d + 1;
  }
  return best;
}

}  // namespace

TEST_CASE("from_edges validation") {
  const std::vector<Edge> loop{{0, 0}};
  const std::vector<Edge> twice{{0, 1}, {1, 0}};
  const std::vector<Edge> outside{{0, 3}};
  CHECK_THROWS_AS(Graph::from_edges(3, loop), std::invalid_argument);
  CHECK_THROWS_AS(Graph::from_edges(3, twice), std::invalid_argument);
  CHECK_THROWS_AS(Graph::from_edges(3, outside), std::invalid_argument);
  CHECK_THROWS_AS(RegularGraph(path_graph(4)), std::invalid_argument);
}

TEST_CASE("girth of small graphs") {
  CHECK(girth(cycle_graph(3)) == 3);
  CHECK(girth(cycle_graph(5)) == 5);
  CHECK(girth(cycle_graph(8)) == 8);
  CHECK(girth(named_graph("petersen")) == 5);
  CHECK(girth(named_graph("heawood")) == 6);
  CHECK_FALSE(girth(path_graph(6)).has_value());
  CHECK_FALSE(girth(rooted_tree(3, 2)).has_value());
  CHECK(girth(disjoint_union(cycle_graph(7), cycle_graph(4))) == 4);

  CHECK(named_graph("petersen").delta() == 3);
  CHECK(named_graph("heawood").size() == 14);
  CHECK(named_graph("heawood").delta() == 3);
}

TEST_CASE("girth agrees with the edge-removal oracle") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto g = random_regular(30, 3, seed);
    CHECK(girth(g).value_or(0) == girth_by_edge_removal(g));
  }
  const auto g = random_regular(40, 4, 99);
  CHECK(girth(g).value_or(0) == girth_by_edge_removal(g));
}

TEST_CASE("girth with a limit is min(girth, limit)") {
  const auto h = named_graph("heawood");
  CHECK(girth(h, 4) == 4);
  CHECK(girth(h, 6) == 6);
  CHECK(girth(h, 9) == 6);
  CHECK(girth(path_graph(5), 4) == 4);
}

TEST_CASE("distances and farthest pair") {
  const auto c = cycle_graph(10);
  CHECK(distance(c, 0, 5) == 5);
  CHECK(distance(c, 2, 9) == 3);
  const auto fp = farthest_pair(c);
  CHECK(fp.u == 0);
  CHECK(fp.v == 5);
  CHECK(fp.distance == 5);
  CHECK(fp.connected);

  CHECK(farthest_pair(named_graph("petersen")).distance == 2);
  CHECK(farthest_pair(named_graph("heawood")).distance == 3);
  CHECK(farthest_pair(path_graph(7)).distance == 6);

  const auto split = disjoint_union(cycle_graph(4), cycle_graph(9));
  CHECK(distance(split, 0, 5) == -1);
  const auto fs = farthest_pair(split);
  CHECK_FALSE(fs.connected);
  CHECK(fs.distance == 4);
  CHECK(fs.u >= 4);
}

TEST_CASE("rewire a cycle") {
  const auto c8 = cycle_graph(8);
  const auto joined = rewire(c8, 0, 4);
  CHECK(joined.size() == 6);
  CHECK(cycle_type(joined) == std::vector<int>{6});
  CHECK(girth(joined) == 6);

  CHECK_THROWS_AS(rewire(cycle_graph(7), 0, 3), std::invalid_argument);
  CHECK_THROWS_AS(rewire(c8, 0, 3), std::invalid_argument);
}

TEST_CASE("neighbor pairing matters for cycles") {
  const auto c8 = cycle_graph(8);
  const auto a = rewire(c8, 0, 4, Pairing::kReversed);
  const auto b = rewire(c8, 0, 4, Pairing::kSorted);
  CHECK(a.delta() == 2);
  CHECK(b.delta() == 2);
  CHECK(cycle_type(a) == std::vector<int>{6});
  CHECK(cycle_type(b) == std::vector<int>{3, 3});
}

TEST_CASE("rewire keeps node and edge arithmetic") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto g = random_regular(200, 3, seed);
    const auto fp = farthest_pair(g);
    for (auto p : {Pairing::kSorted, Pairing::kReversed}) {
      const auto h = rewire(g, fp.u, fp.v, p);
      CHECK(h.size() == g.size() - 2);
      CHECK(h.edge_count() == g.edge_count() - 3);
      CHECK(h.delta() == 3);
    }
  }
}

TEST_CASE("rewire step budget") {
  CHECK(rewire_step_budget(1000000, 3, 4) == 440951);
  CHECK(rewire_step_budget(100, 3, 4) == 0);
}

TEST_CASE("rewire chain preconditions") {
  CHECK_THROWS_AS(rewire_chain(cycle_graph(100), 3), std::invalid_argument);
  CHECK_THROWS_AS(rewire_chain(named_graph("petersen"), 6), std::invalid_argument);
  // 2(2g+1)Δ^{2g} = 4608 for a cycle at g = 4
  CHECK_THROWS_AS(rewire_chain(cycle_graph(100), 4), std::invalid_argument);
  CHECK_NOTHROW(rewire_chain(cycle_graph(5000), 4, {.max_steps = 2}));
}

TEST_CASE("cycle chain shrinks by two each step") {
  RewireChainOptions opts;
  opts.min_distance = 3;
  opts.lemma_budget = false;
  CHECK_THROWS_AS(rewire_chain(cycle_graph(100), 4, opts), std::invalid_argument);

  opts.min_distance = 4;
  const auto chain = rewire_chain(cycle_graph(100), 4, opts);
  REQUIRE(chain.snapshots.size() == 48);
  for (std::size_t k = 0; k < chain.snapshots.size(); ++k) {
    const int n = 100 - 2 * static_cast<int>(k);
    CHECK(cycle_type(chain.snapshots[k]) == std::vector<int>{n});
  }
  CHECK(chain.snapshots.back().size() == 6);
  for (const auto& s : chain.log) CHECK(s.girth == s.n);
  CHECK(chain.log.front().pair_distance == 50);
}

TEST_CASE("lemma budget chain on a large cycle") {
  const auto chain = rewire_chain(cycle_graph(5000), 4, {.keep_snapshots = false, .max_steps = 3});
  CHECK(chain.budget == rewire_step_budget(5000, 2, 4));
  REQUIRE(chain.log.size() == 3);
  CHECK(chain.log.back().n == 4994);
  CHECK(chain.log.back().girth == 4994);
}

TEST_CASE("random regular generation") {
  const auto g = random_regular(500, 3, 7);
  CHECK(g.size() == 500);
  CHECK(g.delta() == 3);
  CHECK(g.edge_count() == 750);
  CHECK(g == random_regular(500, 3, 7));
  CHECK_FALSE(g == random_regular(500, 3, 8));
  CHECK(girth(g).has_value());
  CHECK_THROWS_AS(random_regular(5, 3, 1), std::invalid_argument);
  CHECK_THROWS_AS(random_regular(10, 10, 1), std::invalid_argument);

  const auto h = random_regular_with_girth(200, 3, 5, 3);
  CHECK(girth(h).value() >= 5);
}

TEST_CASE("graph specs") {
  CHECK(graph_from_spec("cycle:30").size() == 30);
  CHECK(graph_from_spec("petersen") == named_graph("petersen"));
  CHECK(graph_from_spec("tree:2:2").size() == 7);
  CHECK(graph_from_spec("matching:10").edge_count() == 5);
  CHECK(graph_from_spec("random:500:3:7") == random_regular(500, 3, 7));
  CHECK_THROWS_AS(graph_from_spec("cycle"), std::invalid_argument);
  CHECK_THROWS_AS(graph_from_spec("cycle:x"), std::invalid_argument);
  CHECK_THROWS_AS(graph_from_spec("mobius:8"), std::invalid_argument);
}

TEST_CASE("edge list round trip") {
  const auto g = random_regular(60, 3, 11);
  std::stringstream ss;
  write_edge_list(ss, g, "random cubic\nseed 11");
  CHECK(ss.str().rfind("# random cubic\n# seed 11\n60 90\n", 0) == 0);
  CHECK(read_edge_list(ss) == g);

  std::istringstream bad_count("3 3\n0 1\n1 2\n");
  CHECK_THROWS_AS(read_edge_list(bad_count), std::invalid_argument);
  std::istringstream bad_line("2 1\n0 one\n");
  CHECK_THROWS_AS(read_edge_list(bad_line), std::invalid_argument);
  std::istringstream empty("# nothing\n");
  CHECK_THROWS_AS(read_edge_list(empty), std::invalid_argument);
}
