#include "hardcore/graph.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <deque>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include "hardcore/rng.hpp"

namespace hardcore {

Graph Graph::from_edges(int n, std::span<const Edge> edges) {
  if (n < 0) throw std::invalid_argument("negative node count");
  Graph g(n);
  for (auto [u, v] : edges) {
    if (u < 0 || v < 0 || u >= n || v >= n) {
      throw std::invalid_argument("edge (" + std::to_string(u) + ", " + std::to_string(v) + ") outside 0.." +
                                  std::to_string(n - 1));
    }
    if (u == v) throw std::invalid_argument("self-loop at node " + std::to_string(u));
    g.adj_[static_cast<std::size_t>(u)].push_back(v);
    g.adj_[static_cast<std::size_t>(v)].push_back(u);
  }
  for (std::size_t u = 0; u < g.adj_.size(); ++u) {
    auto& nb = g.adj_[u];
    std::sort(nb.begin(), nb.end());
    if (std::adjacent_find(nb.begin(), nb.end()) != nb.end()) {
      throw std::invalid_argument("repeated edge at node " + std::to_string(u));
    }
  }
  g.edges_ = edges.size();
  return g;
}

bool Graph::has_edge(int u, int v) const {
  const auto nb = neighbors(u);
  return std::binary_search(nb.begin(), nb.end(), v);
}

std::vector<Edge> Graph::edges() const {
  std::vector<Edge> out;
  out.reserve(edges_);
  for (int u = 0; u < size(); ++u) {
    for (int v : neighbors(u)) {
      if (u < v) out.emplace_back(u, v);
    }
  }
  return out;
}

std::optional<int> Graph::regular_degree() const {
  if (adj_.empty()) return std::nullopt;
  const int d = degree(0);
  for (int u = 1; u < size(); ++u) {
    if (degree(u) != d) return std::nullopt;
  }
  return d;
}

RegularGraph::RegularGraph(Graph g) : Graph(std::move(g)) {
  const auto d = regular_degree();
  if (!d) throw std::invalid_argument("graph is not regular");
  delta_ = *d;
}

std::optional<int> girth(const Graph& g, std::optional<int> limit) {
  const int n = g.size();
  int best = limit ? *limit : std::numeric_limits<int>::max();
  std::vector<int> dist(static_cast<std::size_t>(n), -1);
  std::vector<int> parent(static_cast<std::size_t>(n), -1);
  std::vector<int> touched;
  std::vector<int> queue;
  for (int root = 0; root < n; ++root) {
    for (int t : touched) {
      dist[static_cast<std::size_t>(t)] = -1;
      parent[static_cast<std::size_t>(t)] = -1;
    }
    touched.clear();
    queue.clear();
    dist[static_cast<std::size_t>(root)] = 0;
    touched.push_back(root);
    queue.push_back(root);
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const int u = queue[head];
      const int du = dist[static_cast<std::size_t>(u)];
      // any cycle found from here on has length >= 2 du + 1
      if (2 * du + 1 >= best) break;
      for (int w : g.neighbors(u)) {
        const auto wi = static_cast<std::size_t>(w);
        if (dist[wi] < 0) {
          dist[wi] = du + 1;
          parent[wi] = u;
          touched.push_back(w);
          queue.push_back(w);
        } else if (w != parent[static_cast<std::size_t>(u)]) {
          best = std::min(best, du + dist[wi] + 1);
        }
      }
    }
  }
  if (best == std::numeric_limits<int>::max()) return std::nullopt;
  return best;
}

std::vector<int> bfs_distances(const Graph& g, int source) {
  std::vector<int> dist(static_cast<std::size_t>(g.size()), -1);
  std::vector<int> queue{source};
  dist[static_cast<std::size_t>(source)] = 0;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const int u = queue[head];
    for (int w : g.neighbors(u)) {
      if (dist[static_cast<std::size_t>(w)] < 0) {
        dist[static_cast<std::size_t>(w)] = dist[static_cast<std::size_t>(u)] + 1;
        queue.push_back(w);
      }
    }
  }
  return dist;
}

int distance(const Graph& g, int u, int v) {
  if (u < 0 || v < 0 || u >= g.size() || v >= g.size()) throw std::invalid_argument("node out of range");
  return bfs_distances(g, u)[static_cast<std::size_t>(v)];
}

std::vector<std::vector<int>> components(const Graph& g) {
  std::vector<int> label(static_cast<std::size_t>(g.size()), -1);
  std::vector<std::vector<int>> out;
  for (int s = 0; s < g.size(); ++s) {
    if (label[static_cast<std::size_t>(s)] >= 0) continue;
    std::vector<int> comp{s};
    label[static_cast<std::size_t>(s)] = static_cast<int>(out.size());
    for (std::size_t head = 0; head < comp.size(); ++head) {
      for (int w : g.neighbors(comp[head])) {
        if (label[static_cast<std::size_t>(w)] < 0) {
          label[static_cast<std::size_t>(w)] = static_cast<int>(out.size());
          comp.push_back(w);
        }
      }
    }
    std::sort(comp.begin(), comp.end());
    out.push_back(std::move(comp));
  }
  return out;
}

FarthestPair farthest_pair(const Graph& g) {
  if (g.size() == 0) throw std::invalid_argument("empty graph");
  const auto comps = components(g);
  std::size_t largest = 0;
  for (std::size_t c = 1; c < comps.size(); ++c) {
    if (comps[c].size() > comps[largest].size()) largest = c;
  }
  FarthestPair best;
  best.connected = comps.size() == 1;
  best.u = comps[largest].front();
  best.v = best.u;
  best.distance = 0;
  for (int u : comps[largest]) {
    const auto dist = bfs_distances(g, u);
    for (int v : comps[largest]) {
      if (v > u && dist[static_cast<std::size_t>(v)] > best.distance) {
        best.u = u;
        best.v = v;
        best.distance = dist[static_cast<std::size_t>(v)];
      }
    }
  }
  return best;
}

std::vector<int> cycle_type(const Graph& g) {
  if (g.regular_degree() != 2) throw std::invalid_argument("cycle_type needs a 2-regular graph");
  std::vector<int> lengths;
  for (const auto& c : components(g)) lengths.push_back(static_cast<int>(c.size()));
  std::sort(lengths.begin(), lengths.end());
  return lengths;
}

RegularGraph rewire(const RegularGraph& g, int u1, int u2, Pairing pairing) {
  const int n = g.size();
  if (u1 < 0 || u2 < 0 || u1 >= n || u2 >= n) throw std::invalid_argument("rewire node out of range");
  const int d = distance(g, u1, u2);
  if (d >= 0 && d < 4) {
    throw std::invalid_argument("rewire needs distance(u1, u2) >= 4, got " + std::to_string(d) + " for nodes " +
                                std::to_string(u1) + ", " + std::to_string(u2));
  }
  std::vector<int> relabel(static_cast<std::size_t>(n), -1);
  int next = 0;
  for (int u = 0; u < n; ++u) {
    if (u != u1 && u != u2) relabel[static_cast<std::size_t>(u)] = next++;
  }
  std::vector<Edge> edges;
  for (auto [a, b] : g.edges()) {
    if (a == u1 || a == u2 || b == u1 || b == u2) continue;
    edges.emplace_back(relabel[static_cast<std::size_t>(a)], relabel[static_cast<std::size_t>(b)]);
  }
  const auto n1 = g.neighbors(u1);
  const auto n2 = g.neighbors(u2);
  const std::size_t deg = n1.size();
  for (std::size_t i = 0; i < deg; ++i) {
    const int partner = pairing == Pairing::kSorted ? n2[i] : n2[deg - 1 - i];
    edges.emplace_back(relabel[static_cast<std::size_t>(n1[i])], relabel[static_cast<std::size_t>(partner)]);
  }
  return RegularGraph(Graph::from_edges(n - 2, edges));
}

long long rewire_step_budget(long long n, int delta, int g) {
  const long double reserve = (2.0L * g + 1.0L) * std::pow(static_cast<long double>(delta), 2 * g);
  const long double budget = static_cast<long double>(n / 2) - reserve;
  return budget > 0 ? static_cast<long long>(budget) : 0;
}

RewireChain rewire_chain(const RegularGraph& g, int min_girth, const RewireChainOptions& options) {
  if (min_girth < 4) {
    throw std::invalid_argument("rewire_chain needs g >= 4 (the girth argument assumes g > 3), got " +
                                std::to_string(min_girth));
  }
  const auto g0 = girth(g);
  if (g0 && *g0 < min_girth) {
    throw std::invalid_argument("input girth " + std::to_string(*g0) + " is below g = " + std::to_string(min_girth));
  }
  const int min_distance = options.min_distance.value_or(2 * min_girth + 1);
  if (min_distance < 4) throw std::invalid_argument("min_distance must be >= 4");

  RewireChain chain;
  if (options.lemma_budget) {
    const long double reserve = 2.0L * (2.0L * min_girth + 1.0L) * std::pow((long double)g.delta(), 2 * min_girth);
    if (!(reserve < g.size())) {
      throw std::invalid_argument("2(2g+1)Δ^{2g} must be below N = " + std::to_string(g.size()));
    }
    chain.budget = rewire_step_budget(g.size(), g.delta(), min_girth);
  }
  RegularGraph current = g;
  if (options.keep_snapshots) chain.snapshots.push_back(current);
  for (int step = 1;; ++step) {
    if (chain.budget >= 0 && step > chain.budget) break;
    if (options.max_steps && step > *options.max_steps) break;
    if (current.size() < 2) break;
    const auto fp = farthest_pair(current);
    if (fp.connected && fp.distance < min_distance) break;
    if (!fp.connected && fp.distance < min_distance) break;
    RegularGraph next = rewire(current, fp.u, fp.v, options.pairing);
    const auto gi = girth(next);
    if (next.delta() != g.delta() || (gi && *gi < min_girth)) {
      throw RewireInvariantError("rewire step " + std::to_string(step) + " produced girth " +
                                     std::to_string(gi.value_or(0)) + " below " + std::to_string(min_girth),
                                 edge_list_string(next));
    }
    chain.log.push_back({step, next.size(), gi.value_or(0), fp.distance});
    current = std::move(next);
    if (options.keep_snapshots) chain.snapshots.push_back(current);
  }
  if (!options.keep_snapshots) chain.snapshots.push_back(current);
  return chain;
}

RegularGraph cycle_graph(int n) {
  if (n < 3) throw std::invalid_argument("cycle needs n >= 3");
  std::vector<Edge> e;
  for (int i = 0; i < n; ++i) e.emplace_back(i, (i + 1) % n);
  return RegularGraph(Graph::from_edges(n, e));
}

RegularGraph named_graph(std::string_view name) {
  std::vector<Edge> e;
  int n = 0;
  if (name == "petersen") {
    n = 10;
    for (int i = 0; i < 5; ++i) {
      e.emplace_back(i, (i + 1) % 5);
      e.emplace_back(i, i + 5);
      e.emplace_back(5 + i, 5 + (i + 2) % 5);
    }
  } else if (name == "heawood") {
    n = 14;
    for (int i = 0; i < 14; ++i) e.emplace_back(i, (i + 1) % 14);
    for (int i = 0; i < 14; i += 2) e.emplace_back(i, (i + 5) % 14);
  } else {
    throw std::invalid_argument("unknown named graph '" + std::string(name) + "' (expected petersen or heawood)");
  }
  return RegularGraph(Graph::from_edges(n, e));
}

RegularGraph perfect_matching(int n) {
  if (n < 2 || n % 2 != 0) throw std::invalid_argument("perfect matching needs an even n >= 2");
  std::vector<Edge> e;
  for (int i = 0; i < n; i += 2) e.emplace_back(i, i + 1);
  return RegularGraph(Graph::from_edges(n, e));
}

Graph path_graph(int n) {
  if (n < 1) throw std::invalid_argument("path needs n >= 1");
  std::vector<Edge> e;
  for (int i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
  return Graph::from_edges(n, e);
}

Graph rooted_tree(int depth, int children) {
  if (depth < 0 || children < 1) throw std::invalid_argument("tree needs depth >= 0 and children >= 1");
  std::vector<Edge> e;
  int n = 1;
  int level_start = 0;
  int level_size = 1;
  for (int d = 0; d < depth; ++d) {
    for (int p = level_start; p < level_start + level_size; ++p) {
      for (int c = 0; c < children; ++c) e.emplace_back(p, n++);
    }
    level_start += level_size;
    level_size *= children;
  }
  return Graph::from_edges(n, e);
}

Graph disjoint_union(const Graph& a, const Graph& b) {
  auto e = a.edges();
  for (auto [u, v] : b.edges()) e.emplace_back(u + a.size(), v + a.size());
  return Graph::from_edges(a.size() + b.size(), e);
}

RegularGraph random_regular(int n, int delta, std::uint64_t seed, int max_retries) {
  if (n < 1 || delta < 0 || delta >= n) throw std::invalid_argument("random_regular needs 0 <= delta < n");
  if ((static_cast<long long>(n) * delta) % 2 != 0) throw std::invalid_argument("n * delta must be even");
  const std::size_t points = static_cast<std::size_t>(n) * static_cast<std::size_t>(delta);
  std::vector<int> owner(points);
  for (std::size_t p = 0; p < points; ++p) owner[p] = static_cast<int>(p / static_cast<std::size_t>(delta));
  std::vector<Edge> edges(points / 2);
  for (int attempt = 0; attempt < max_retries; ++attempt) {
    auto rng = stream(seed, static_cast<std::uint64_t>(attempt));
    std::vector<int> perm = owner;
    for (std::size_t i = points; i > 1; --i) std::swap(perm[i - 1], perm[rng.below(i)]);
    bool ok = true;
    for (std::size_t k = 0; k < points / 2; ++k) {
      int u = perm[2 * k];
      int v = perm[2 * k + 1];
      if (u == v) {
        ok = false;
        break;
      }
      edges[k] = {std::min(u, v), std::max(u, v)};
    }
    if (!ok) continue;
    std::vector<Edge> sorted = edges;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) continue;
    return RegularGraph(Graph::from_edges(n, sorted));
  }
  throw std::runtime_error("pairing model failed " + std::to_string(max_retries) + " times for n=" +
                           std::to_string(n) + ", delta=" + std::to_string(delta));
}

RegularGraph random_regular_with_girth(int n, int delta, int min_girth, std::uint64_t seed, long long max_attempts) {
  for (long long k = 0; k < max_attempts; ++k) {
    RegularGraph g = random_regular(n, delta, derive_seed(seed, static_cast<std::uint64_t>(k)));
    const auto gi = girth(g, min_girth);
    if (!gi || *gi >= min_girth) return g;
  }
  throw std::runtime_error("no graph with girth >= " + std::to_string(min_girth) + " after " +
                           std::to_string(max_attempts) + " attempts");
}

namespace {

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

long long to_int(std::string_view s, std::string_view spec) {
  long long v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw std::invalid_argument("bad number '" + std::string(s) + "' in graph spec '" + std::string(spec) + "'");
  }
  return v;
}

}  // namespace

Graph graph_from_spec(std::string_view spec) {
  const auto parts = split(spec, ':');
  const auto kind = parts[0];
  auto arg = [&](std::size_t i) { return static_cast<int>(to_int(parts.at(i), spec)); };
  auto need = [&](std::size_t count) {
    if (parts.size() != count + 1) {
      throw std::invalid_argument("graph spec '" + std::string(spec) + "' needs " + std::to_string(count) +
                                  " arguments");
    }
  };
  if (kind == "petersen" || kind == "heawood") {
    need(0);
    return named_graph(kind);
  }
  if (kind == "triangle") {
    need(0);
    return cycle_graph(3);
  }
  if (kind == "edge") {
    need(0);
    return path_graph(2);
  }
  if (kind == "cycle") {
    need(1);
    return cycle_graph(arg(1));
  }
  if (kind == "path") {
    need(1);
    return path_graph(arg(1));
  }
  if (kind == "matching") {
    need(1);
    return perfect_matching(arg(1));
  }
  if (kind == "tree") {
    need(2);
    return rooted_tree(arg(1), arg(2));
  }
  if (kind == "random") {
    need(3);
    return random_regular(arg(1), arg(2), static_cast<std::uint64_t>(to_int(parts[3], spec)));
  }
  if (kind == "random-girth") {
    need(4);
    return random_regular_with_girth(arg(1), arg(2), arg(3), static_cast<std::uint64_t>(to_int(parts[4], spec)));
  }
  throw std::invalid_argument("unknown graph spec '" + std::string(spec) + "'");
}

Graph read_edge_list(std::istream& in) {
  std::string line;
  std::vector<std::string> data;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    data.push_back(line);
  }
  if (data.empty()) throw std::invalid_argument("edge list has no header line");
  long long n = -1;
  long long m = -1;
  {
    std::istringstream hs(data[0]);
    std::string extra;
    if (!(hs >> n >> m) || (hs >> extra) || n < 0 || m < 0) {
      throw std::invalid_argument("bad edge list header '" + data[0] + "'");
    }
  }
  if (static_cast<long long>(data.size()) - 1 != m) {
    throw std::invalid_argument("edge list declares " + std::to_string(m) + " edges but has " +
                                std::to_string(data.size() - 1));
  }
  std::vector<Edge> edges;
  for (std::size_t k = 1; k < data.size(); ++k) {
    std::istringstream ls(data[k]);
    long long u = 0;
    long long v = 0;
    std::string extra;
    if (!(ls >> u >> v) || (ls >> extra)) throw std::invalid_argument("bad edge line '" + data[k] + "'");
    edges.emplace_back(static_cast<int>(u), static_cast<int>(v));
  }
  return Graph::from_edges(static_cast<int>(n), edges);
}

Graph read_edge_list_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open graph file '" + path + "'");
  return read_edge_list(in);
}

void write_edge_list(std::ostream& out, const Graph& g, std::string_view comment) {
  if (!comment.empty()) {
    for (auto line : split(comment, '\n')) out << "# " << line << '\n';
  }
  out << g.size() << ' ' << g.edge_count() << '\n';
  for (auto [u, v] : g.edges()) out << u << ' ' << v << '\n';
}

std::string edge_list_string(const Graph& g) {
  std::ostringstream os;
  write_edge_list(os, g);
  return os.str();
}

}  // namespace hardcore
