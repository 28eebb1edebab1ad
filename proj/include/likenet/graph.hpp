#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <ostream>
#include <queue>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "likenet/rng.hpp"

namespace likenet {

using NodeId = std::size_t;

/// Unordered node pair stored with first < second.
struct Edge {
  NodeId first;
  NodeId second;

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Undirected, unweighted simple graph over nodes [0, n).
///
/// Immutable after construction. Edges are kept sorted, adjacency lists are
/// sorted, so every derived quantity is a deterministic function of the
/// edge set.
class Graph {
 public:
  Graph() = default;

  Graph(std::size_t n, std::vector<Edge> edges) : n_(n), adjacency_(n) {
    if (n == 0) throw std::invalid_argument("graph: node count must be positive");
    for (auto& e : edges) {
      if (e.first == e.second) {
        throw std::invalid_argument("graph: self-loop on node " + std::to_string(e.first));
      }
      if (e.first >= n || e.second >= n) {
        throw std::invalid_argument("graph: edge (" + std::to_string(e.first) + "," +
                                    std::to_string(e.second) + ") out of range for n=" +
                                    std::to_string(n));
      }
      if (e.first > e.second) std::swap(e.first, e.second);
    }
    std::sort(edges.begin(), edges.end());
    if (std::adjacent_find(edges.begin(), edges.end()) != edges.end()) {
      throw std::invalid_argument("graph: duplicate edge");
    }
    edges_ = std::move(edges);
    for (const auto& e : edges_) {
      adjacency_[e.first].push_back(e.second);
      adjacency_[e.second].push_back(e.first);
    }
    for (auto& nbrs : adjacency_) std::sort(nbrs.begin(), nbrs.end());
  }

  std::size_t size() const { return n_; }
  std::size_t edge_count() const { return edges_.size(); }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<NodeId>& neighbors(NodeId i) const { return adjacency_.at(i); }
  std::size_t degree(NodeId i) const { return adjacency_.at(i).size(); }

  bool has_edge(NodeId i, NodeId j) const {
    if (i >= n_ || j >= n_) return false;
    const auto& nbrs = adjacency_[i];
    return std::binary_search(nbrs.begin(), nbrs.end(), j);
  }

  std::vector<std::size_t> degrees() const {
    std::vector<std::size_t> d(n_);
    for (NodeId i = 0; i < n_; ++i) d[i] = adjacency_[i].size();
    return d;
  }

  /// Maps node i to perm[i]. perm must be a permutation of [0, n).
  Graph relabeled(const std::vector<NodeId>& perm) const {
    if (perm.size() != n_) throw std::invalid_argument("graph: permutation size mismatch");
    std::vector<Edge> out;
    out.reserve(edges_.size());
    for (const auto& e : edges_) out.push_back({perm[e.first], perm[e.second]});
    return Graph(n_, std::move(out));
  }

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.n_ == b.n_ && a.edges_ == b.edges_;
  }

 private:
  std::size_t n_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::vector<NodeId>> adjacency_;
};

/// Barabási-Albert preferential attachment.
///
/// Starts from a k-clique on nodes [0, k). Each arriving node picks k distinct
/// existing targets, drawing one at a time with probability proportional to
/// current degree among the not-yet-chosen nodes (uniform if all remaining
/// weights are zero). Edge count is k(k-1)/2 + k(n-k).
inline Graph generate_ba(std::size_t n, std::size_t k, std::uint64_t seed) {
  if (k < 1) throw std::invalid_argument("generate_ba: k must be >= 1");
  if (n < k) throw std::invalid_argument("generate_ba: n must be >= k");

  std::vector<Edge> edges;
  std::vector<std::size_t> degree(n, 0);
  for (NodeId a = 0; a < k; ++a) {
    for (NodeId b = a + 1; b < k; ++b) {
      edges.push_back({a, b});
      ++degree[a];
      ++degree[b];
    }
  }

  std::mt19937_64 gen(seed);
  std::vector<char> taken(n, 0);
  std::vector<NodeId> targets;
  for (NodeId v = k; v < n; ++v) {
    targets.clear();
    std::fill(taken.begin(), taken.begin() + static_cast<std::ptrdiff_t>(v), 0);
    for (std::size_t draw = 0; draw < k; ++draw) {
      std::size_t total = 0;
      std::size_t open = 0;
      for (NodeId u = 0; u < v; ++u) {
        if (!taken[u]) {
          total += degree[u];
          ++open;
        }
      }
      NodeId pick = 0;
      if (total == 0) {
        std::uint64_t slot = bounded(gen, open);
        for (NodeId u = 0; u < v; ++u) {
          if (taken[u]) continue;
          if (slot-- == 0) { pick = u; break; }
        }
      } else {
        // Integer roulette keeps the draw exact and platform independent.
        std::uint64_t ticket = bounded(gen, total);
        for (NodeId u = 0; u < v; ++u) {
          if (taken[u]) continue;
          if (ticket < degree[u]) { pick = u; break; }
          ticket -= degree[u];
        }
      }
      taken[pick] = 1;
      targets.push_back(pick);
    }
    for (NodeId t : targets) {
      edges.push_back({t, v});
      ++degree[t];
      ++degree[v];
    }
  }
  return Graph(n, std::move(edges));
}

/// Node 0 is the hub; every other node is a leaf attached to it.
inline Graph generate_star(std::size_t n) {
  if (n < 2) throw std::invalid_argument("generate_star: n must be >= 2");
  std::vector<Edge> edges;
  for (NodeId leaf = 1; leaf < n; ++leaf) edges.push_back({0, leaf});
  return Graph(n, std::move(edges));
}

inline Graph generate_complete(std::size_t n) {
  std::vector<Edge> edges;
  for (NodeId a = 0; a < n; ++a)
    for (NodeId b = a + 1; b < n; ++b) edges.push_back({a, b});
  return Graph(n, std::move(edges));
}

inline Graph generate_cycle(std::size_t n) {
  if (n < 3) throw std::invalid_argument("generate_cycle: n must be >= 3");
  std::vector<Edge> edges;
  for (NodeId a = 0; a < n; ++a) edges.push_back({a, (a + 1) % n});
  return Graph(n, std::move(edges));
}

inline Graph generate_path(std::size_t n) {
  std::vector<Edge> edges;
  for (NodeId a = 0; a + 1 < n; ++a) edges.push_back({a, a + 1});
  return Graph(n, std::move(edges));
}

// ---------------------------------------------------------------------------
// Metrics

/// BFS hop distances from source; unreachable nodes get SIZE_MAX.
inline std::vector<std::size_t> bfs_distances(const Graph& g, NodeId source) {
  constexpr auto unreached = static_cast<std::size_t>(-1);
  std::vector<std::size_t> dist(g.size(), unreached);
  std::queue<NodeId> frontier;
  dist[source] = 0;
  frontier.push(source);
  while (!frontier.empty()) {
    NodeId u = frontier.front();
    frontier.pop();
    for (NodeId w : g.neighbors(u)) {
      if (dist[w] == unreached) {
        dist[w] = dist[u] + 1;
        frontier.push(w);
      }
    }
  }
  return dist;
}

inline bool is_connected(const Graph& g) {
  if (g.size() == 0) return true;
  const auto dist = bfs_distances(g, 0);
  return std::none_of(dist.begin(), dist.end(),
                      [](std::size_t d) { return d == static_cast<std::size_t>(-1); });
}

/// Mean geodesic distance over unordered distinct pairs. Throws on a
/// disconnected graph. A single-node graph has no pairs and yields 0.
inline double mean_path_length(const Graph& g) {
  const std::size_t n = g.size();
  if (n < 2) return 0.0;
  std::uint64_t total = 0;
  for (NodeId s = 0; s < n; ++s) {
    const auto dist = bfs_distances(g, s);
    for (NodeId t = s + 1; t < n; ++t) {
      if (dist[t] == static_cast<std::size_t>(-1)) {
        throw std::domain_error("mean_path_length: graph is disconnected");
      }
      total += dist[t];
    }
  }
  const double pairs = static_cast<double>(n) * static_cast<double>(n - 1) / 2.0;
  return static_cast<double>(total) / pairs;
}

/// Watts-Strogatz local clustering of one node; degree < 2 gives 0.
inline double local_clustering(const Graph& g, NodeId i) {
  const auto& nbrs = g.neighbors(i);
  const std::size_t d = nbrs.size();
  if (d < 2) return 0.0;
  std::size_t links = 0;
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = a + 1; b < d; ++b)
      if (g.has_edge(nbrs[a], nbrs[b])) ++links;
  return static_cast<double>(links) / (static_cast<double>(d * (d - 1)) / 2.0);
}

inline double mean_local_clustering(const Graph& g) {
  if (g.size() == 0) return 0.0;
  double sum = 0.0;
  for (NodeId i = 0; i < g.size(); ++i) sum += local_clustering(g, i);
  return sum / static_cast<double>(g.size());
}

/// Population standard deviation of node degrees.
inline double degree_stddev(const Graph& g) {
  const auto d = g.degrees();
  if (d.empty()) return 0.0;
  double mean = 0.0;
  for (auto x : d) mean += static_cast<double>(x);
  mean /= static_cast<double>(d.size());
  double var = 0.0;
  for (auto x : d) {
    const double dx = static_cast<double>(x) - mean;
    var += dx * dx;
  }
  return std::sqrt(var / static_cast<double>(d.size()));
}

/// Counts per degree value 0..n-1.
inline std::vector<std::size_t> degree_histogram(const Graph& g) {
  std::vector<std::size_t> hist(g.size(), 0);
  for (NodeId i = 0; i < g.size(); ++i) ++hist[g.degree(i)];
  return hist;
}

struct GraphMetrics {
  std::vector<std::size_t> degree_histogram;
  double degree_stddev = 0.0;
  double mean_path_length = 0.0;  // NaN when disconnected
  double mean_local_clustering = 0.0;
  bool connected = false;
};

inline GraphMetrics compute_metrics(const Graph& g) {
  GraphMetrics m;
  m.degree_histogram = degree_histogram(g);
  m.degree_stddev = degree_stddev(g);
  m.mean_local_clustering = mean_local_clustering(g);
  m.connected = is_connected(g);
  m.mean_path_length = m.connected ? mean_path_length(g) : std::nan("");
  return m;
}

// ---------------------------------------------------------------------------
// Edge-list text format: "n=<N>" header, then one "i j" pair per line.

inline void write_edge_list(std::ostream& out, const Graph& g) {
  out << "n=" << g.size() << '\n';
  for (const auto& e : g.edges()) out << e.first << ' ' << e.second << '\n';
}

inline std::string to_edge_list(const Graph& g) {
  std::ostringstream out;
  write_edge_list(out, g);
  return out.str();
}

inline Graph read_edge_list(std::istream& in) {
  std::string line;
  std::size_t n = 0;
  bool have_header = false;
  std::vector<Edge> edges;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (!have_header) {
      std::istringstream hs(line);
      std::string tag;
      if (!std::getline(hs, tag, '=') || tag.find_first_not_of(" \t") == std::string::npos ||
          tag.substr(tag.find_first_not_of(" \t")) != "n" || !(hs >> n)) {
        throw std::runtime_error("edge list: expected header 'n=<N>' on line " +
                                 std::to_string(lineno));
      }
      have_header = true;
      continue;
    }
    std::istringstream ls(line);
    long long a = -1, b = -1;
    std::string rest;
    if (!(ls >> a >> b) || (ls >> rest) || a < 0 || b < 0) {
      throw std::runtime_error("edge list: malformed edge on line " + std::to_string(lineno));
    }
    edges.push_back({static_cast<NodeId>(a), static_cast<NodeId>(b)});
  }
  if (!have_header) throw std::runtime_error("edge list: missing 'n=<N>' header");
  return Graph(n, std::move(edges));
}

inline Graph parse_edge_list(const std::string& text) {
  std::istringstream in(text);
  return read_edge_list(in);
}

}  // namespace likenet
