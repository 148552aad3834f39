#include "byzg/graph.hpp"

#include <algorithm>
#include <numeric>
#include <queue>
#include <random>
#include <set>

#include "byzg/rng.hpp"

namespace byzg {

int PortGraph::edge_count() const {
  int half = 0;
  for (const auto& row : adj_) half += static_cast<int>(row.size());
  return half / 2;
}

Landing PortGraph::traverse(NodeId v, Port p) const {
  const auto& row = adj_.at(v);
  if (p < 0 || p >= static_cast<int>(row.size())) {
    throw std::out_of_range("port " + std::to_string(p) + " does not exist at node " + std::to_string(v));
  }
  return {row[p].neighbor, row[p].back_port};
}

ValidationReport validate(const PortGraph& g) {
  ValidationReport report;
  const int n = g.size();
  if (n == 0) {
    report.issues.push_back({Violation::kEmpty, -1, -1, "graph has no nodes"});
    return report;
  }
  const auto& adj = g.adjacency();
  bool structurally_sound = true;
  for (NodeId v = 0; v < n; ++v) {
    std::set<NodeId> seen;
    for (Port p = 0; p < static_cast<int>(adj[v].size()); ++p) {
      const auto [u, q] = adj[v][p];
      if (u < 0 || u >= n) {
        report.issues.push_back({Violation::kPortRange, v, p, "neighbor out of range"});
        structurally_sound = false;
        continue;
      }
      if (u == v) report.issues.push_back({Violation::kSelfLoop, v, p, "self-loop"});
      if (!seen.insert(u).second) report.issues.push_back({Violation::kParallelEdge, v, p, "parallel edge"});
      if (q < 0 || q >= static_cast<int>(adj[u].size())) {
        report.issues.push_back({Violation::kReciprocity, u, q, "back port does not exist"});
        structurally_sound = false;
        continue;
      }
      if (adj[u][q].neighbor != v || adj[u][q].back_port != p) {
        report.issues.push_back({Violation::kReciprocity, u, q,
                                 "entry (" + std::to_string(u) + "," + std::to_string(q) + ") does not lead back to (" +
                                     std::to_string(v) + "," + std::to_string(p) + ")"});
      }
    }
  }
  if (!structurally_sound) return report;
  std::vector<bool> reached(n, false);
  std::queue<NodeId> frontier;
  frontier.push(0);
  reached[0] = true;
  while (!frontier.empty()) {
    const NodeId v = frontier.front();
    frontier.pop();
    for (const auto& e : adj[v]) {
      if (!reached[e.neighbor]) {
        reached[e.neighbor] = true;
        frontier.push(e.neighbor);
      }
    }
  }
  for (NodeId v = 0; v < n; ++v) {
    if (!reached[v]) report.issues.push_back({Violation::kDisconnected, v, -1, "node unreachable from node 0"});
  }
  return report;
}

std::optional<GraphKind> parse_graph_kind(const std::string& name) {
  if (name == "path") return GraphKind::kPath;
  if (name == "ring") return GraphKind::kRing;
  if (name == "star") return GraphKind::kStar;
  if (name == "complete") return GraphKind::kComplete;
  if (name == "random_connected") return GraphKind::kRandomConnected;
  return std::nullopt;
}

std::string to_string(GraphKind kind) {
  switch (kind) {
    case GraphKind::kPath: return "path";
    case GraphKind::kRing: return "ring";
    case GraphKind::kStar: return "star";
    case GraphKind::kComplete: return "complete";
    case GraphKind::kRandomConnected: return "random_connected";
  }
  return "unknown";
}

namespace {

// Builds port tables from an edge list; ports at each node follow `order[v]`,
// a permutation of the node's incident edge indices.
PortGraph from_edges(int n, const std::vector<std::pair<NodeId, NodeId>>& edges,
                     const std::vector<std::vector<int>>& order) {
  std::vector<std::vector<PortEntry>> adj(n);
  std::vector<std::vector<std::pair<int, Port>>> port_of_edge(n);  // (edge, port) per node
  for (NodeId v = 0; v < n; ++v) {
    adj[v].resize(order[v].size());
    for (Port p = 0; p < static_cast<int>(order[v].size()); ++p) port_of_edge[v].push_back({order[v][p], p});
  }
  auto port_at = [&](NodeId v, int edge) {
    for (const auto& [e, p] : port_of_edge[v]) {
      if (e == edge) return p;
    }
    throw std::logic_error("edge not incident");
  };
  for (int e = 0; e < static_cast<int>(edges.size()); ++e) {
    const auto [a, b] = edges[e];
    const Port pa = port_at(a, e);
    const Port pb = port_at(b, e);
    adj[a][pa] = {b, pb};
    adj[b][pb] = {a, pa};
  }
  return PortGraph(std::move(adj));
}

std::vector<std::vector<int>> incident_in_order(int n, const std::vector<std::pair<NodeId, NodeId>>& edges) {
  std::vector<std::vector<int>> inc(n);
  for (int e = 0; e < static_cast<int>(edges.size()); ++e) {
    inc[edges[e].first].push_back(e);
    inc[edges[e].second].push_back(e);
  }
  return inc;
}

}  // namespace

PortGraph generate(GraphKind kind, const GraphParams& params, std::uint64_t seed) {
  const int n = params.n;
  if (n < 1) throw std::invalid_argument("graph needs at least one node");
  if (n > 255) throw std::invalid_argument("graph codes support at most 255 nodes");
  switch (kind) {
    case GraphKind::kPath: {
      if (n < 2) throw std::invalid_argument("path needs n >= 2");
      std::vector<std::vector<PortEntry>> adj(n);
      for (NodeId v = 0; v + 1 < n; ++v) {
        const Port pv = static_cast<Port>(adj[v].size());
        const Port pu = static_cast<Port>(adj[v + 1].size());
        adj[v].push_back({v + 1, pu});
        adj[v + 1].push_back({v, pv});
      }
      return PortGraph(std::move(adj));
    }
    case GraphKind::kRing: {
      if (n < 3) throw std::invalid_argument("ring needs n >= 3");
      std::vector<std::vector<PortEntry>> adj(n, std::vector<PortEntry>(2));
      for (NodeId v = 0; v < n; ++v) {
        adj[v][0] = {(v + 1) % n, 1};
        adj[v][1] = {(v + n - 1) % n, 0};
      }
      return PortGraph(std::move(adj));
    }
    case GraphKind::kStar: {
      if (n < 2) throw std::invalid_argument("star needs n >= 2");
      std::vector<std::vector<PortEntry>> adj(n);
      for (NodeId leaf = 1; leaf < n; ++leaf) {
        adj[0].push_back({leaf, 0});
        adj[leaf].push_back({0, leaf - 1});
      }
      return PortGraph(std::move(adj));
    }
    case GraphKind::kComplete: {
      if (n < 2) throw std::invalid_argument("complete graph needs n >= 2");
      std::vector<std::vector<PortEntry>> adj(n);
      for (NodeId v = 0; v < n; ++v) {
        for (NodeId u = 0; u < n; ++u) {
          if (u == v) continue;
          const Port back = v < u ? v : v - 1;
          adj[v].push_back({u, back});
        }
      }
      return PortGraph(std::move(adj));
    }
    case GraphKind::kRandomConnected: {
      if (n < 2) throw std::invalid_argument("random_connected needs n >= 2");
      const long max_edges = static_cast<long>(n) * (n - 1) / 2;
      if (params.extra_edges < 0 || params.extra_edges > max_edges - (n - 1)) {
        throw std::invalid_argument("extra_edges out of range");
      }
      Rng rng(seed);
      // Uniform labeled spanning tree via a random Pruefer sequence.
      std::vector<std::pair<NodeId, NodeId>> edges;
      if (n == 2) {
        edges.push_back({0, 1});
      } else {
        std::vector<NodeId> pruefer(n - 2);
        for (auto& x : pruefer) x = static_cast<NodeId>(rng.below(n));
        std::vector<int> degree(n, 1);
        for (NodeId x : pruefer) ++degree[x];
        for (NodeId x : pruefer) {
          NodeId leaf = 0;
          while (degree[leaf] != 1) ++leaf;
          edges.push_back({std::min(leaf, x), std::max(leaf, x)});
          --degree[leaf];
          --degree[x];
        }
        NodeId a = -1, b = -1;
        for (NodeId v = 0; v < n; ++v) {
          if (degree[v] == 1) (a < 0 ? a : b) = v;
        }
        edges.push_back({a, b});
      }
      std::set<std::pair<NodeId, NodeId>> present(edges.begin(), edges.end());
      std::vector<std::pair<NodeId, NodeId>> absent;
      for (NodeId u = 0; u < n; ++u) {
        for (NodeId v = u + 1; v < n; ++v) {
          if (!present.count({u, v})) absent.push_back({u, v});
        }
      }
      for (int i = 0; i < params.extra_edges; ++i) {
        const auto pick = static_cast<std::size_t>(i + static_cast<long>(rng.below(absent.size() - i)));
        std::swap(absent[i], absent[pick]);
        edges.push_back(absent[i]);
      }
      auto order = incident_in_order(n, edges);
      for (auto& row : order) rng.shuffle(row);
      return from_edges(n, edges, order);
    }
  }
  throw std::invalid_argument("unknown graph kind");
}

GraphCode encode(const PortGraph& g) {
  if (g.size() > 255) throw std::invalid_argument("graph codes support at most 255 nodes");
  GraphCode code;
  code.reserve(1 + g.size() + 4 * g.edge_count());
  code.push_back(static_cast<std::uint8_t>(g.size()));
  for (const auto& row : g.adjacency()) {
    code.push_back(static_cast<std::uint8_t>(row.size()));
    for (const auto& e : row) {
      code.push_back(static_cast<std::uint8_t>(e.neighbor));
      code.push_back(static_cast<std::uint8_t>(e.back_port));
    }
  }
  return code;
}

PortGraph decode(const GraphCode& code) {
  if (code.empty()) throw std::invalid_argument("empty graph code");
  const int n = code[0];
  if (n == 0) throw std::invalid_argument("graph code declares zero nodes");
  std::vector<std::vector<PortEntry>> adj(n);
  std::size_t at = 1;
  for (NodeId v = 0; v < n; ++v) {
    if (at >= code.size()) throw std::invalid_argument("graph code truncated");
    const int deg = code[at++];
    if (at + 2 * static_cast<std::size_t>(deg) > code.size()) throw std::invalid_argument("graph code truncated");
    for (int p = 0; p < deg; ++p) {
      adj[v].push_back({code[at], code[at + 1]});
      at += 2;
    }
  }
  if (at != code.size()) throw std::invalid_argument("trailing bytes in graph code");
  PortGraph g(std::move(adj));
  const auto report = validate(g);
  if (!report.ok()) throw std::invalid_argument("graph code is not a valid graph: " + report.issues.front().message);
  return g;
}

bool shortlex_less(const std::vector<std::uint8_t>& a, const std::vector<std::uint8_t>& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

PortGraph permute(const PortGraph& g, const std::vector<NodeId>& perm) {
  std::vector<std::vector<PortEntry>> adj(g.size());
  for (NodeId v = 0; v < g.size(); ++v) {
    auto row = g.adjacency()[v];
    for (auto& e : row) e.neighbor = perm[e.neighbor];
    adj[perm[v]] = std::move(row);
  }
  return PortGraph(std::move(adj));
}

namespace {

bool connected_edges(int n, const std::vector<std::pair<NodeId, NodeId>>& edges) {
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  int components = n;
  for (const auto& [a, b] : edges) {
    const int ra = find(a), rb = find(b);
    if (ra != rb) {
      parent[ra] = rb;
      --components;
    }
  }
  return components == 1;
}

}  // namespace

std::vector<PortGraph> all_port_graphs(int n, int m) {
  if (n < 1) return {};
  if (n == 1) return m == 0 ? std::vector<PortGraph>{PortGraph(std::vector<std::vector<PortEntry>>(1))} : std::vector<PortGraph>{};
  std::vector<std::pair<NodeId, NodeId>> slots;
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v = u + 1; v < n; ++v) slots.push_back({u, v});
  }
  const int total = static_cast<int>(slots.size());
  if (m < n - 1 || m > total) return {};
  std::vector<std::pair<GraphCode, PortGraph>> found;
  std::vector<bool> pick(total, false);
  std::fill(pick.begin(), pick.begin() + m, true);
  do {
    std::vector<std::pair<NodeId, NodeId>> edges;
    for (int s = 0; s < total; ++s) {
      if (pick[s]) edges.push_back(slots[s]);
    }
    if (!connected_edges(n, edges)) continue;
    auto order = incident_in_order(n, edges);
    for (auto& row : order) std::sort(row.begin(), row.end());
    // Odometer over per-node permutations.
    while (true) {
      PortGraph g = from_edges(n, edges, order);
      found.push_back({encode(g), std::move(g)});
      NodeId v = 0;
      while (v < n && !std::next_permutation(order[v].begin(), order[v].end())) ++v;
      if (v == n) break;
    }
  } while (std::prev_permutation(pick.begin(), pick.end()));
  std::sort(found.begin(), found.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<PortGraph> out;
  out.reserve(found.size());
  for (auto& [code, g] : found) out.push_back(std::move(g));
  return out;
}

std::vector<PortGraph> all_port_graphs(int n) {
  std::vector<PortGraph> out;
  for (int m = std::max(0, n - 1); m <= n * (n - 1) / 2; ++m) {
    auto part = all_port_graphs(n, m);
    out.insert(out.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
  }
  return out;
}

std::vector<PortGraph> port_graph_classes(int n) {
  std::vector<NodeId> base(n);
  std::iota(base.begin(), base.end(), 0);
  std::set<GraphCode> canonical;
  std::vector<PortGraph> out;
  for (const auto& g : all_port_graphs(n)) {
    GraphCode best;
    auto perm = base;
    do {
      auto code = encode(permute(g, perm));
      if (best.empty() || code < best) best = std::move(code);
    } while (std::next_permutation(perm.begin(), perm.end()));
    if (canonical.insert(best).second) out.push_back(decode(best));
  }
  return out;
}

std::vector<int> bfs_distances(const PortGraph& g, NodeId source) {
  std::vector<int> dist(g.size(), -1);
  std::queue<NodeId> frontier;
  dist[source] = 0;
  frontier.push(source);
  while (!frontier.empty()) {
    const NodeId v = frontier.front();
    frontier.pop();
    for (const auto& e : g.adjacency()[v]) {
      if (dist[e.neighbor] < 0) {
        dist[e.neighbor] = dist[v] + 1;
        frontier.push(e.neighbor);
      }
    }
  }
  return dist;
}

}  // namespace byzg
