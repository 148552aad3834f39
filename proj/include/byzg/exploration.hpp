#pragma once

// Graph-oblivious exploration: EXPLO driven by a universal exploration
// sequence, and EST', the token-based BFS exploration used by explorers.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "byzg/graph.hpp"

namespace byzg {

struct Uxs {
  int cap_n = 0;
  std::vector<int> steps;
  std::string verified;  // "exhaustive" or "corpus"
  std::string corpus_hash;

  long length() const { return static_cast<long>(steps.size()); }
};

/// Memoized provider. N <= 4 is searched and verified exhaustively; larger N
/// gets a seeded sequence verified against generated graphs of size <= N.
/// Throws std::invalid_argument for N < 1 or N beyond the provider table.
const Uxs& uxs_for(int N);

/// Largest N the provider table accepts.
constexpr int kMaxUxsN = 8;

/// Installs a sequence (e.g. from a cache file) after verifying it; returns
/// false and leaves the table untouched when verification fails.
bool install_uxs(const Uxs& u);

struct Counterexample {
  std::size_t graph_index = 0;
  NodeId start = 0;
  NodeId unvisited = 0;
};

/// Empty optional means every (graph, start) walk covers its graph.
std::optional<Counterexample> verify_uxs(const Uxs& u, const std::vector<PortGraph>& graphs);
/// Same contract; OpenMP over (graph, start) pairs. Returns the lowest-index
/// counterexample so the result matches the serial version exactly.
std::optional<Counterexample> verify_uxs_parallel(const Uxs& u, const std::vector<PortGraph>& graphs);

/// Generated graphs of size <= N that sequences for N >= 5 are checked on.
std::vector<PortGraph> uxs_corpus(int N);
std::string uxs_corpus_hash(int N);

/// Every connected simple port-numbered graph with 1..N nodes.
std::vector<PortGraph> all_graphs_up_to(int N);

/// Nodes visited by the UXS walk from `start` (start included).
std::vector<NodeId> explo_visits(const Uxs& u, const PortGraph& g, NodeId start);

struct Move {
  Port exit = 0;
  Port entry = 0;
  friend bool operator==(const Move&, const Move&) = default;
};
using MoveLog = std::vector<Move>;

/// EXPLO cursor. The start node counts as entered by port 0.
struct ExploWalk {
  long cursor = 0;
  Port last_entry = 0;
  MoveLog log;
};

/// Exit port for the next step: (p + x) mod deg. Advances the cursor; the
/// caller reports the entry port with explo_record once the move lands.
/// Throws std::logic_error past the end of the sequence.
Port explo_step(ExploWalk& w, const Uxs& u, int deg);
void explo_record(ExploWalk& w, Port exit, Port entry);

/// Exit ports that undo `log`, last move first.
std::vector<Port> backtrack_plan(const MoveLog& log);

/// T(EXPLO(N)) = P(N) + 1.
long t_explo(int N);
/// 8 N^5. Throws std::overflow_error when it does not fit.
long t_est(int N);

// ---- EST' ----

struct EstObservation {
  int degree = 0;
  std::optional<Port> entry;  // port of the move that landed here
  bool token = false;         // >= f+1 token claims of this phase here
};

enum class EstStatus { kMove, kFinished, kFailed };

struct EstAction {
  EstStatus status = EstStatus::kMove;
  Port port = 0;
};

/// One BFS-tree node, identified by its port path from the root.
struct EstTreeNode {
  MoveLog path;
  int degree = -1;
  bool processed = false;
};

struct EstRun {
  enum class Phase {
    kStart,        // at the root, nothing done yet
    kToNeighbor,   // just left w by `port`
    kProbe,        // walking the reversal of path(probe_target) from x
    kReturnToX,    // undoing probe moves
    kToW,          // stepping back from x to w
    kRelocate,     // following `relocation` to the next node to process
  };

  int n_i = 0;
  long limit = 0;
  long rounds_used = 0;
  int nodes_added = 0;
  std::vector<EstTreeNode> tree;
  Phase phase = Phase::kStart;
  int w = 0;          // tree node being processed
  Port port = 0;      // port of w under check
  Port x_entry = 0;   // entry port at x
  int probe_target = 0;
  int probe_step = 0;
  MoveLog probe_moves;
  bool matched = false;
  std::vector<Port> relocation;
  int relocation_step = 0;
  int relocation_target = 0;
  MoveLog log;        // every move made, for the explorer's backtrack
  std::optional<Port> pending_exit;
  std::optional<int> learned_size;
  bool done = false;
};

EstRun est_init(int n_i, long round_limit);
/// One round of EST'. `obs` describes the node the agent is at this round.
EstAction est_step(EstRun& run, const EstObservation& obs);

}  // namespace byzg
