#include "byzg/exploration.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <numeric>
#include <set>
#include <stdexcept>

#include "byzg/rng.hpp"

namespace byzg {

namespace {

struct WalkState {
  NodeId node = 0;
  Port entry = 0;
  std::uint32_t visited = 0;
};

int lcm_upto(int m) {
  int l = 1;
  for (int i = 2; i <= m; ++i) l = std::lcm(l, i);
  return l;
}

std::uint32_t full_mask(int n) { return n >= 32 ? ~0u : ((1u << n) - 1); }

void walk_one(const PortGraph& g, WalkState& s, int x) {
  const int d = g.degree(s.node);
  const Landing l = g.traverse(s.node, (s.entry + x) % d);
  s.node = l.node;
  s.entry = l.port;
  s.visited |= 1u << l.node;
}

// A set of simultaneous walks, one per (graph class, start).
struct WalkFront {
  std::vector<const PortGraph*> graphs;
  std::vector<WalkState> states;

  long score() const {
    long s = 0;
    for (std::size_t i = 0; i < states.size(); ++i) {
      const int n = graphs[i]->size();
      const int missing = n - std::popcount(states[i].visited);
      if (missing > 0) s += 1000 + missing;
    }
    return s;
  }

  void apply(int x) {
    for (std::size_t i = 0; i < states.size(); ++i) {
      if (graphs[i]->size() > 1) walk_one(*graphs[i], states[i], x);
    }
  }

  // Drops finished walks; they stay finished whatever comes next.
  void compact() {
    std::size_t out = 0;
    for (std::size_t i = 0; i < states.size(); ++i) {
      if (states[i].visited != full_mask(graphs[i]->size())) {
        graphs[out] = graphs[i];
        states[out] = states[i];
        ++out;
      }
    }
    graphs.resize(out);
    states.resize(out);
  }
};

WalkFront initial_front(const std::vector<PortGraph>& graphs) {
  WalkFront f;
  for (const auto& g : graphs) {
    for (NodeId s = 0; s < g.size(); ++s) {
      f.graphs.push_back(&g);
      f.states.push_back({s, 0, 1u << s});
    }
  }
  f.compact();
  return f;
}

std::vector<PortGraph> classes_up_to(int N) {
  std::vector<PortGraph> out;
  for (int n = 2; n <= N; ++n) {
    auto part = port_graph_classes(n);
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

// Shortest sequence by iterative deepening; only practical for N <= 3.
std::vector<int> search_shortest(int N) {
  const auto graphs = classes_up_to(N);
  const WalkFront start = initial_front(graphs);
  const int alphabet = lcm_upto(N - 1);
  for (int len = 0;; ++len) {
    std::vector<int> seq(len, 0);
    while (true) {
      WalkFront f = start;
      for (int x : seq) f.apply(x);
      if (f.score() == 0) return seq;
      int i = 0;
      while (i < len && ++seq[i] == alphabet) seq[i++] = 0;
      if (i == len) break;
    }
  }
}

// Greedy with lookahead: commit the first symbol of the best continuation of
// length L; widen L while no continuation makes progress.
std::vector<int> search_greedy(int N) {
  const auto graphs = classes_up_to(N);
  WalkFront front = initial_front(graphs);
  const int alphabet = lcm_upto(N - 1);
  std::vector<int> seq;
  const int base_lookahead = 2;
  int lookahead = base_lookahead;
  while (!front.states.empty()) {
    long best_score = front.score();
    std::vector<int> best;
    std::vector<int> cand(lookahead, 0);
    while (true) {
      WalkFront f = front;
      for (int x : cand) f.apply(x);
      const long s = f.score();
      if (s < best_score) {
        best_score = s;
        best = cand;
      }
      int i = lookahead - 1;
      while (i >= 0 && ++cand[i] == alphabet) cand[i--] = 0;
      if (i < 0) break;
    }
    if (best.empty()) {
      if (lookahead < 5) {
        ++lookahead;
        continue;
      }
      best = {static_cast<int>(seq.size() % alphabet)};
    }
    front.apply(best.front());
    front.compact();
    seq.push_back(best.front());
    lookahead = base_lookahead;
  }
  return seq;
}

std::vector<PortGraph> corpus_graphs(int N) {
  std::vector<PortGraph> out;
  for (int n = 2; n <= N; ++n) {
    out.push_back(generate(GraphKind::kPath, {n, 0}));
    out.push_back(generate(GraphKind::kStar, {n, 0}));
    out.push_back(generate(GraphKind::kComplete, {n, 0}));
    if (n >= 3) out.push_back(generate(GraphKind::kRing, {n, 0}));
    const int max_extra = n * (n - 1) / 2 - (n - 1);
    for (std::uint64_t seed = 0; seed < 16; ++seed) {
      const int extra = max_extra == 0 ? 0 : static_cast<int>(seed % (max_extra + 1));
      out.push_back(generate(GraphKind::kRandomConnected, {n, extra}, seed));
    }
  }
  return out;
}

std::string hash_graphs(const std::vector<PortGraph>& graphs) {
  std::uint64_t h = 1469598103934665603ULL;
  for (const auto& g : graphs) {
    for (std::uint8_t b : encode(g)) {
      h ^= b;
      h *= 1099511628211ULL;
    }
  }
  static const char* hex = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, h >>= 4) s[i] = hex[h & 15];
  return s;
}

// The sequence for N-1, then seeded random symbols until every corpus walk
// is covering. Keeps P(N) non-decreasing in N.
std::vector<int> search_corpus(int N, const std::vector<PortGraph>& corpus, std::vector<int> prefix) {
  Rng rng(mix_seed(0x75c5ULL, static_cast<std::uint64_t>(N)));
  const int alphabet = lcm_upto(N - 1);
  WalkFront front = initial_front(corpus);
  for (int x : prefix) {
    front.apply(x);
    front.compact();
  }
  std::vector<int> seq = std::move(prefix);
  while (!front.states.empty()) {
    const int x = static_cast<int>(rng.below(alphabet));
    front.apply(x);
    front.compact();
    seq.push_back(x);
  }
  return seq;
}

Uxs build_uxs(int N) {
  Uxs u;
  u.cap_n = N;
  if (N == 1) {
    u.verified = "exhaustive";
    return u;
  }
  if (N <= 3) {
    u.steps = search_shortest(N);
  } else if (N == 4) {
    u.steps = search_greedy(N);
  } else {
    const auto corpus = corpus_graphs(N);
    u.steps = search_corpus(N, corpus, uxs_for(N - 1).steps);
    u.verified = "corpus";
    u.corpus_hash = hash_graphs(corpus);
    if (verify_uxs(u, corpus)) throw std::logic_error("corpus sequence failed its own corpus");
    return u;
  }
  u.verified = "exhaustive";
  if (verify_uxs_parallel(u, all_graphs_up_to(N))) throw std::logic_error("searched sequence failed verification");
  return u;
}

// Recursive: building N reads the table entry for N-1.
std::recursive_mutex& table_mutex() {
  static std::recursive_mutex m;
  return m;
}

std::map<int, Uxs>& table() {
  static std::map<int, Uxs> t;
  return t;
}

}  // namespace

std::vector<PortGraph> all_graphs_up_to(int N) {
  std::vector<PortGraph> out;
  for (int n = 1; n <= N; ++n) {
    auto part = all_port_graphs(n);
    out.insert(out.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
  }
  return out;
}

const Uxs& uxs_for(int N) {
  if (N < 1) throw std::invalid_argument("uxs_for: N must be positive");
  if (N > kMaxUxsN) {
    throw std::invalid_argument("no UXS provider for N=" + std::to_string(N) + "; extend the provider table (max " +
                                std::to_string(kMaxUxsN) + ")");
  }
  std::lock_guard lock(table_mutex());
  auto it = table().find(N);
  if (it == table().end()) it = table().emplace(N, build_uxs(N)).first;
  return it->second;
}

std::vector<PortGraph> uxs_corpus(int N) { return corpus_graphs(N); }

std::string uxs_corpus_hash(int N) { return hash_graphs(corpus_graphs(N)); }

bool install_uxs(const Uxs& u) {
  if (u.cap_n < 1 || u.cap_n > kMaxUxsN) return false;
  const auto graphs = u.verified == "exhaustive" ? all_graphs_up_to(u.cap_n) : corpus_graphs(u.cap_n);
  if (u.cap_n > 1 && verify_uxs_parallel(u, graphs)) return false;
  std::lock_guard lock(table_mutex());
  table()[u.cap_n] = u;
  return true;
}

std::vector<NodeId> explo_visits(const Uxs& u, const PortGraph& g, NodeId start) {
  std::vector<NodeId> order{start};
  if (g.size() <= 1) return order;
  WalkState s{start, 0, 1u << start};
  for (int x : u.steps) {
    walk_one(g, s, x);
    order.push_back(s.node);
  }
  return order;
}

namespace {

std::optional<NodeId> first_unvisited(const Uxs& u, const PortGraph& g, NodeId start) {
  if (g.size() <= 1) return std::nullopt;
  WalkState s{start, 0, 1u << start};
  const std::uint32_t all = full_mask(g.size());
  for (int x : u.steps) {
    if (s.visited == all) break;
    walk_one(g, s, x);
  }
  for (NodeId v = 0; v < g.size(); ++v) {
    if (!(s.visited >> v & 1u)) return v;
  }
  return std::nullopt;
}

}  // namespace

std::optional<Counterexample> verify_uxs(const Uxs& u, const std::vector<PortGraph>& graphs) {
  for (std::size_t gi = 0; gi < graphs.size(); ++gi) {
    for (NodeId s = 0; s < graphs[gi].size(); ++s) {
      if (auto miss = first_unvisited(u, graphs[gi], s)) return Counterexample{gi, s, *miss};
    }
  }
  return std::nullopt;
}

std::optional<Counterexample> verify_uxs_parallel(const Uxs& u, const std::vector<PortGraph>& graphs) {
  std::vector<std::pair<std::size_t, NodeId>> pairs;
  for (std::size_t gi = 0; gi < graphs.size(); ++gi) {
    for (NodeId s = 0; s < graphs[gi].size(); ++s) pairs.push_back({gi, s});
  }
  const long total = static_cast<long>(pairs.size());
  long first_bad = total;
#pragma omp parallel for schedule(dynamic, 64) reduction(min : first_bad)
  for (long i = 0; i < total; ++i) {
    if (i < first_bad && first_unvisited(u, graphs[pairs[i].first], pairs[i].second)) first_bad = i;
  }
  if (first_bad == total) return std::nullopt;
  const auto [gi, s] = pairs[first_bad];
  return Counterexample{gi, s, *first_unvisited(u, graphs[gi], s)};
}

Port explo_step(ExploWalk& w, const Uxs& u, int deg) {
  if (w.cursor >= u.length()) throw std::logic_error("explo_step past the end of the sequence");
  if (deg < 1) throw std::logic_error("explo_step at an isolated node");
  const long x = u.steps[w.cursor++];
  return static_cast<Port>((w.last_entry + x) % deg);
}

void explo_record(ExploWalk& w, Port exit, Port entry) {
  w.log.push_back({exit, entry});
  w.last_entry = entry;
}

std::vector<Port> backtrack_plan(const MoveLog& log) {
  std::vector<Port> plan;
  plan.reserve(log.size());
  for (auto it = log.rbegin(); it != log.rend(); ++it) plan.push_back(it->entry);
  return plan;
}

long t_explo(int N) { return uxs_for(N).length() + 1; }

long t_est(int N) {
  long r = 8;
  for (int i = 0; i < 5; ++i) {
    if (__builtin_mul_overflow(r, static_cast<long>(N), &r)) throw std::overflow_error("t_est overflows");
  }
  return r;
}

// ---- EST' ----

EstRun est_init(int n_i, long round_limit) {
  EstRun run;
  run.n_i = n_i;
  run.limit = round_limit;
  return run;
}

namespace {

EstAction emit(EstRun& run, Port p) {
  run.pending_exit = p;
  return {EstStatus::kMove, p};
}

EstAction fail(EstRun& run) {
  run.done = true;
  return {EstStatus::kFailed, 0};
}

EstAction begin_port(EstRun& run);
EstAction start_probe(EstRun& run, const EstObservation& obs);

EstAction after_return(EstRun& run, const EstObservation& obs) {
  if (!run.matched && run.probe_target + 1 < static_cast<int>(run.tree.size())) {
    ++run.probe_target;
    return start_probe(run, obs);
  }
  if (!run.matched) {
    EstTreeNode x;
    x.path = run.tree[run.w].path;
    x.path.push_back({run.port, run.x_entry});
    x.degree = obs.degree;
    run.tree.push_back(std::move(x));
    if (++run.nodes_added > run.n_i) return fail(run);
  }
  run.phase = EstRun::Phase::kToW;
  return emit(run, run.x_entry);
}

EstAction finish_probe(EstRun& run, const EstObservation& obs, bool matched) {
  run.matched = matched;
  if (run.probe_moves.empty()) return after_return(run, obs);
  run.phase = EstRun::Phase::kReturnToX;
  run.probe_step = 0;
  return emit(run, run.probe_moves.back().entry);
}

// Next move of the probe, or its conclusion when the path is used up or
// cannot be followed from here.
EstAction continue_probe(EstRun& run, const EstObservation& obs) {
  const MoveLog& q = run.tree[run.probe_target].path;
  const int len = static_cast<int>(q.size());
  if (run.probe_step == len) return finish_probe(run, obs, obs.token);
  const Port exit = q[len - 1 - run.probe_step].entry;
  if (exit >= obs.degree) return finish_probe(run, obs, false);
  run.phase = EstRun::Phase::kProbe;
  return emit(run, exit);
}

EstAction start_probe(EstRun& run, const EstObservation& obs) {
  run.probe_moves.clear();
  run.probe_step = 0;
  return continue_probe(run, obs);
}

EstAction begin_port(EstRun& run) {
  EstTreeNode& w = run.tree[run.w];
  if (run.port < w.degree) {
    run.phase = EstRun::Phase::kToNeighbor;
    return emit(run, run.port);
  }
  w.processed = true;
  int next = -1;
  for (int i = 0; i < static_cast<int>(run.tree.size()); ++i) {
    if (run.tree[i].processed) continue;
    if (next < 0) {
      next = i;
      continue;
    }
    const auto& a = run.tree[i].path;
    const auto& b = run.tree[next].path;
    const bool shorter = a.size() < b.size();
    const bool lex = a.size() == b.size() &&
                     std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(),
                                                  [](const Move& m, const Move& o) { return m.exit < o.exit; });
    if (shorter || lex) next = i;
  }
  if (next < 0) {
    run.done = true;
    if (run.nodes_added < run.n_i) return {EstStatus::kFailed, 0};
    run.learned_size = run.nodes_added;
    return {EstStatus::kFinished, 0};
  }
  run.relocation.clear();
  const auto& from = w.path;
  for (auto it = from.rbegin(); it != from.rend(); ++it) run.relocation.push_back(it->entry);
  for (const auto& m : run.tree[next].path) run.relocation.push_back(m.exit);
  run.relocation_target = next;
  run.relocation_step = 0;
  run.phase = EstRun::Phase::kRelocate;
  return emit(run, run.relocation.front());
}

}  // namespace

EstAction est_step(EstRun& run, const EstObservation& obs) {
  if (run.done) throw std::logic_error("est_step on a completed run");
  Port entry = 0;
  if (run.pending_exit) {
    if (!obs.entry) throw std::logic_error("est_step: entry port missing after a move");
    entry = *obs.entry;
    run.log.push_back({*run.pending_exit, entry});
    run.pending_exit.reset();
  }
  if (++run.rounds_used > run.limit) return fail(run);

  using P = EstRun::Phase;
  switch (run.phase) {
    case P::kStart: {
      EstTreeNode root;
      root.degree = obs.degree;
      run.tree.push_back(root);
      run.nodes_added = 1;
      if (run.nodes_added > run.n_i) return fail(run);
      run.w = 0;
      run.port = 0;
      return begin_port(run);
    }
    case P::kToNeighbor:
      run.x_entry = entry;
      run.probe_target = 0;
      run.matched = false;
      return start_probe(run, obs);
    case P::kProbe: {
      const MoveLog& q = run.tree[run.probe_target].path;
      const Move& expected = q[q.size() - 1 - run.probe_step];
      run.probe_moves.push_back({expected.entry, entry});
      ++run.probe_step;
      if (entry != expected.exit) return finish_probe(run, obs, false);
      return continue_probe(run, obs);
    }
    case P::kReturnToX:
      if (++run.probe_step == static_cast<int>(run.probe_moves.size())) return after_return(run, obs);
      return emit(run, run.probe_moves[run.probe_moves.size() - 1 - run.probe_step].entry);
    case P::kToW:
      ++run.port;
      return begin_port(run);
    case P::kRelocate:
      if (++run.relocation_step == static_cast<int>(run.relocation.size())) {
        run.w = run.relocation_target;
        run.port = 0;
        return begin_port(run);
      }
      return emit(run, run.relocation[run.relocation_step]);
  }
  throw std::logic_error("est_step: bad phase");
}

}  // namespace byzg
