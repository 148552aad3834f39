#pragma once

// Drives EST' with a perfect token at the root and checks the result against
// a plain breadth-first search of the same graph.

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "byzg/exploration.hpp"

namespace byzg::test {

struct EstOutcome {
  EstStatus status = EstStatus::kFailed;
  std::optional<int> learned;
  long rounds = 0;
  std::vector<Port> moves;
  std::string problem;  // empty when the tree matches the BFS oracle
};

inline EstOutcome drive_est(const PortGraph& g, NodeId root, int n_i, long step_limit = 1'000'000) {
  EstOutcome out;
  EstRun run = est_init(n_i, t_est(n_i));
  NodeId at = root;
  std::optional<Port> entry;
  for (long s = 0; s < step_limit; ++s) {
    const EstAction a = est_step(run, {g.degree(at), entry, at == root});
    ++out.rounds;
    if (a.status != EstStatus::kMove) {
      out.status = a.status;
      break;
    }
    const Landing l = g.traverse(at, a.port);
    out.moves.push_back(a.port);
    at = l.node;
    entry = l.port;
  }
  out.learned = run.learned_size;

  // independent oracle: the tree must hold one node per reachable node, each
  // at its BFS distance, reached by a path whose recorded entry ports are real
  const auto dist = bfs_distances(g, root);
  std::set<NodeId> seen;
  for (const auto& t : run.tree) {
    NodeId v = root;
    for (const auto& m : t.path) {
      if (m.exit >= g.degree(v)) {
        out.problem = "tree path uses a missing port";
        return out;
      }
      const Landing l = g.traverse(v, m.exit);
      if (l.port != m.entry) {
        out.problem = "tree path records a wrong entry port";
        return out;
      }
      v = l.node;
    }
    if (static_cast<int>(t.path.size()) != dist[v]) out.problem = "tree depth differs from BFS distance";
    if (t.degree != -1 && t.degree != g.degree(v)) out.problem = "tree node degree is wrong";
    if (!seen.insert(v).second) out.problem = "node added twice";
  }
  if (static_cast<int>(seen.size()) != g.size() && out.status == EstStatus::kFinished && n_i == g.size()) {
    out.problem = "tree misses nodes";
  }
  return out;
}

}  // namespace byzg::test
