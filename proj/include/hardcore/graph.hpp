#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace hardcore {

using Edge = std::pair<int, int>;

/// Simple undirected graph on nodes 0..n-1 with sorted adjacency lists.
class Graph {
 public:
  Graph() = default;
  explicit Graph(int n) : adj_(static_cast<std::size_t>(n)) {}

  /// Throws std::invalid_argument on loops, repeated edges or bad labels.
  static Graph from_edges(int n, std::span<const Edge> edges);

  int size() const { return static_cast<int>(adj_.size()); }
  std::size_t edge_count() const { return edges_; }
  std::span<const int> neighbors(int u) const { return adj_[static_cast<std::size_t>(u)]; }
  int degree(int u) const { return static_cast<int>(adj_[static_cast<std::size_t>(u)].size()); }
  bool has_edge(int u, int v) const;

  /// Edges (u, v) with u < v in lexicographic order.
  std::vector<Edge> edges() const;

  /// The common degree, if every node has the same one.
  std::optional<int> regular_degree() const;

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  std::vector<std::vector<int>> adj_;
  std::size_t edges_ = 0;
};

/// A Graph validated to be Δ-regular.
class RegularGraph : public Graph {
 public:
  explicit RegularGraph(Graph g);
  int delta() const { return delta_; }

 private:
  int delta_ = 0;
};

/// Shortest cycle length; nullopt for forests. With a limit, the search stops
/// once no cycle shorter than `limit` can exist and returns `limit` if none was
/// found (so the result is min(girth, limit)).
std::optional<int> girth(const Graph& g, std::optional<int> limit = std::nullopt);

/// BFS distances from `source` (-1 for unreachable nodes).
std::vector<int> bfs_distances(const Graph& g, int source);

/// Distance between u and v; -1 if disconnected.
int distance(const Graph& g, int u, int v);

struct FarthestPair {
  int u = 0;
  int v = 0;
  int distance = 0;
  bool connected = true;  // false: the pair is within the largest component
};

/// Diameter-realizing pair with lexicographically smallest (u, v).
FarthestPair farthest_pair(const Graph& g);

/// Connected components, each as a sorted node list, ordered by smallest node.
std::vector<std::vector<int>> components(const Graph& g);

/// Sorted cycle lengths of a 2-regular graph (its isomorphism invariant).
std::vector<int> cycle_type(const Graph& g);

enum class Pairing { kSorted, kReversed };

/// Deletes u1 and u2 and joins the i-th neighbor of u1 to the i-th (or
/// reversed i-th) neighbor of u2. Remaining nodes keep their order and are
/// relabeled to 0..n-3. Requires distance(u1, u2) >= 4.
RegularGraph rewire(const RegularGraph& g, int u1, int u2, Pairing pairing = Pairing::kReversed);

/// (N/2) - (2g+1) Δ^{2g}, floored at 0.
long long rewire_step_budget(long long n, int delta, int g);

struct RewireStep {
  int step = 0;
  int n = 0;
  int girth = 0;  // 0 for forests
  int pair_distance = 0;
};

struct RewireChainOptions {
  /// Minimum farthest-pair distance to keep rewiring; default 2g+1.
  std::optional<int> min_distance;
  /// Stop after (N/2) - (2g+1)Δ^{2g} steps and require 2(2g+1)Δ^{2g} < N.
  bool lemma_budget = true;
  Pairing pairing = Pairing::kReversed;
  bool keep_snapshots = true;
  std::optional<int> max_steps;
};

struct RewireChain {
  std::vector<RegularGraph> snapshots;  // starts with the input graph
  std::vector<RewireStep> log;
  long long budget = -1;  // -1 when not enforced
};

/// Raised when a rewired graph breaks regularity or girth; carries the
/// offending graph as an edge list.
class RewireInvariantError : public std::runtime_error {
 public:
  RewireInvariantError(const std::string& what, std::string snapshot)
      : std::runtime_error(what), snapshot_(std::move(snapshot)) {}
  const std::string& snapshot() const { return snapshot_; }

 private:
  std::string snapshot_;
};

RewireChain rewire_chain(const RegularGraph& g, int min_girth, const RewireChainOptions& options = {});

// Generators.
RegularGraph cycle_graph(int n);
RegularGraph named_graph(std::string_view name);  // petersen, heawood
RegularGraph perfect_matching(int n);
Graph path_graph(int n);
/// Every internal node has `children` children; depth 0 is a single node.
Graph rooted_tree(int depth, int children);
Graph disjoint_union(const Graph& a, const Graph& b);

/// Uniform simple Δ-regular graph by the pairing model with rejection.
RegularGraph random_regular(int n, int delta, std::uint64_t seed, int max_retries = 10000);
/// Rejection sampling on top of random_regular until girth >= min_girth.
RegularGraph random_regular_with_girth(int n, int delta, int min_girth, std::uint64_t seed,
                                       long long max_attempts = 1000000);

/// Builds a generator from a spec such as cycle:30, petersen, heawood,
/// path:5, tree:2:2, matching:10, random:500:3:7 (n, Δ, seed) or
/// random-girth:2000:3:6:1 (n, Δ, girth, seed).
Graph graph_from_spec(std::string_view spec);

// Edge-list I/O: optional '#' lines, then "N M", then M lines "u v".
Graph read_edge_list(std::istream& in);
Graph read_edge_list_file(const std::string& path);
void write_edge_list(std::ostream& out, const Graph& g, std::string_view comment = {});
std::string edge_list_string(const Graph& g);

}  // namespace hardcore
