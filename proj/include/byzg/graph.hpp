#pragma once

// Anonymous port-numbered graphs: the network agents move in.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace byzg {

using NodeId = int;
using Port = int;

/// One half-edge as seen from its owning node.
struct PortEntry {
  NodeId neighbor = 0;
  Port back_port = 0;

  friend bool operator==(const PortEntry&, const PortEntry&) = default;
};

/// Where a traversal lands: the node entered and the port it was entered by.
struct Landing {
  NodeId node = 0;
  Port port = 0;

  friend bool operator==(const Landing&, const Landing&) = default;
};

/// Immutable adjacency-list graph whose edges are identified only by local
/// port numbers 0..deg(v)-1. Nodes are 0-based internally.
class PortGraph {
 public:
  PortGraph() = default;
  explicit PortGraph(std::vector<std::vector<PortEntry>> adj) : adj_(std::move(adj)) {}

  int size() const { return static_cast<int>(adj_.size()); }
  int degree(NodeId v) const { return static_cast<int>(adj_.at(v).size()); }
  int edge_count() const;

  /// Leaves `v` by port `p`. Throws std::out_of_range when p is not a port of v.
  Landing traverse(NodeId v, Port p) const;

  const std::vector<std::vector<PortEntry>>& adjacency() const { return adj_; }

  friend bool operator==(const PortGraph&, const PortGraph&) = default;

 private:
  std::vector<std::vector<PortEntry>> adj_;
};

enum class Violation { kEmpty, kPortRange, kSelfLoop, kParallelEdge, kReciprocity, kDisconnected };

struct ValidationIssue {
  Violation kind;
  NodeId node = -1;
  Port port = -1;
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;
  bool ok() const { return issues.empty(); }
};

/// Checks port contiguity, reciprocity, simplicity and connectivity.
ValidationReport validate(const PortGraph& g);

enum class GraphKind { kPath, kRing, kStar, kComplete, kRandomConnected };

struct GraphParams {
  int n = 2;
  int extra_edges = 0;  // random_connected only
};

std::optional<GraphKind> parse_graph_kind(const std::string& name);
std::string to_string(GraphKind kind);

/// Deterministic generators. Ring: port 0 clockwise to v+1, port 1 to v-1.
/// Star: centre 0, port i leads to leaf i+1 which uses port 0. Path: node v
/// reaches v+1 through its last port. Throws std::invalid_argument on bad params.
PortGraph generate(GraphKind kind, const GraphParams& params, std::uint64_t seed = 0);

using GraphCode = std::vector<std::uint8_t>;

/// Row-major serialization: n, then per node its degree followed by
/// (neighbor, back_port) pairs in port order. Requires n <= 255.
GraphCode encode(const PortGraph& g);

/// Inverse of encode. Throws std::invalid_argument on malformed input.
PortGraph decode(const GraphCode& code);

/// Length-then-lexicographic order used for every agreed enumeration.
bool shortlex_less(const std::vector<std::uint8_t>& a, const std::vector<std::uint8_t>& b);

/// Relabels nodes: node v of g becomes perm[v].
PortGraph permute(const PortGraph& g, const std::vector<NodeId>& perm);

/// Every connected simple port-numbered graph on nodes 0..n-1 with exactly
/// m edges, sorted by code. Exhaustive; intended for n <= 5.
std::vector<PortGraph> all_port_graphs(int n, int m);

/// Every connected simple port-numbered graph on exactly n labeled nodes.
std::vector<PortGraph> all_port_graphs(int n);

/// One representative per isomorphism class (node relabeling), n nodes.
std::vector<PortGraph> port_graph_classes(int n);

/// Hop distances from `source`; unreachable nodes get -1.
std::vector<int> bfs_distances(const PortGraph& g, NodeId source);

}  // namespace byzg
