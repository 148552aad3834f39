#include "byzg/config_space.hpp"

#include <algorithm>
#include <functional>
#include <mutex>
#include <numeric>
#include <queue>
#include <set>
#include <shared_mutex>

namespace byzg {

namespace {

constexpr std::uint64_t kSaturated = UINT64_MAX;

std::uint64_t sat_add(std::uint64_t a, std::uint64_t b) { return a > kSaturated - b ? kSaturated : a + b; }
std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
  std::uint64_t r;
  return __builtin_mul_overflow(a, b, &r) ? kSaturated : r;
}

int graph_code_length(int n, int m) { return 1 + n + 4 * m; }

// Sets of c distinct positive integers summing to s.
std::uint64_t distinct_sets(int s, int c) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::uint64_t> memo;
  if (c == 0) return s == 0 ? 1 : 0;
  if (s < c * (c + 1) / 2) return 0;
  {
    std::lock_guard lock(mu);
    if (auto it = memo.find({s, c}); it != memo.end()) return it->second;
  }
  // Subtract one from every part; a part equal to one vanishes.
  const std::uint64_t r = sat_add(distinct_sets(s - c, c), distinct_sets(s - c, c - 1));
  std::lock_guard lock(mu);
  memo[{s, c}] = r;
  return r;
}

void each_distinct_set(int s, int c, int min_part, std::vector<int>& acc, const std::function<void()>& fn) {
  if (c == 0) {
    if (s == 0) fn();
    return;
  }
  for (int x = min_part;; ++x) {
    // Smallest completion uses x, x+1, ..., x+c-1.
    const long least = static_cast<long>(c) * x + static_cast<long>(c) * (c - 1) / 2;
    if (least > s) break;
    acc.push_back(x);
    each_distinct_set(s - x, c - 1, x + 1, acc, fn);
    acc.pop_back();
  }
}

std::uint64_t falling(int n, int c) {
  std::uint64_t r = 1;
  for (int i = 0; i < c; ++i) r *= static_cast<std::uint64_t>(n - i);
  return r;
}

const std::vector<PortGraph>& graphs_cached(int n, int m) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::unique_ptr<std::vector<PortGraph>>> cache;
  std::lock_guard lock(mu);
  auto& slot = cache[{n, m}];
  if (!slot) slot = std::make_unique<std::vector<PortGraph>>(all_port_graphs(n, m));
  return *slot;
}

}  // namespace

std::uint64_t count_port_graphs(int n, int m) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::uint64_t> memo;
  {
    std::lock_guard lock(mu);
    if (auto it = memo.find({n, m}); it != memo.end()) return it->second;
  }
  if (n < 1 || n > ConfigEnumerator::kMaxNodes) throw EnumerationLimit("count_port_graphs: n out of reach");
  std::vector<std::pair<int, int>> slots;
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) slots.push_back({u, v});
  }
  std::uint64_t total = n == 1 && m == 0 ? 1 : 0;
  const int s = static_cast<int>(slots.size());
  for (std::uint32_t mask = 0; n > 1 && mask < (1u << s); ++mask) {
    if (std::popcount(mask) != m) continue;
    std::vector<int> parent(n), deg(n, 0);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
    int comps = n;
    for (int e = 0; e < s; ++e) {
      if (!(mask >> e & 1u)) continue;
      auto [a, b] = slots[e];
      ++deg[a];
      ++deg[b];
      if (find(a) != find(b)) {
        parent[find(a)] = find(b);
        --comps;
      }
    }
    if (comps != 1) continue;
    std::uint64_t ways = 1;
    for (int d : deg) {
      for (int k = 2; k <= d; ++k) ways *= k;
    }
    total += ways;
  }
  std::lock_guard lock(mu);
  memo[{n, m}] = total;
  return total;
}

std::vector<std::uint8_t> config_code(const Configuration& c) {
  auto code = encode(c.graph);
  code.push_back(static_cast<std::uint8_t>(c.placements.size()));
  for (const auto& [label, node] : c.placements) {
    code.insert(code.end(), static_cast<std::size_t>(label - 1), 1);
    code.push_back(0);
    code.push_back(static_cast<std::uint8_t>(node + 1));
  }
  return code;
}

void check_configuration(const Configuration& c) {
  if (!validate(c.graph).ok()) throw std::invalid_argument("configuration graph is invalid");
  std::set<NodeId> used;
  for (const auto& [label, node] : c.placements) {
    if (label < 1) throw std::invalid_argument("labels must be positive");
    if (node < 0 || node >= c.graph.size()) throw std::invalid_argument("placement node out of range");
    if (!used.insert(node).second) throw std::invalid_argument("two labels share a node");
  }
  if (c.placements.empty()) throw std::invalid_argument("configuration has no placements");
}

bool passes_filter(const Configuration& c, EnumMode mode) {
  const int k = static_cast<int>(c.placements.size());
  if (mode.known && c.graph.size() != mode.n) return false;
  return k >= mode.min_labels() && k <= c.graph.size();
}

struct ConfigEnumerator::Impl {
  struct Bucket {
    int length = 0;
    std::uint64_t count = 0;
    std::uint64_t end = 0;  // cumulative count through this bucket
  };
  struct Entries {
    std::vector<std::vector<std::uint8_t>> codes;
    std::vector<Configuration> configs;
  };

  EnumMode mode;
  mutable std::shared_mutex mu;
  std::vector<Bucket> buckets;  // consecutive lengths from first_length
  int first_length = 0;
  std::map<int, std::unique_ptr<Entries>> entries;

  std::vector<int> sizes_for(int length) const {
    std::vector<int> ns;
    if (mode.known) {
      ns.push_back(mode.n);
      return ns;
    }
    const int c = mode.min_labels();
    const int least_placement = c * (c + 1) / 2 + c;
    for (int n = c;; ++n) {
      if (graph_code_length(n, n - 1) + 1 + least_placement > length) break;
      if (n > kMaxNodes) throw EnumerationLimit("enumeration reached graphs larger than " + std::to_string(kMaxNodes));
      ns.push_back(n);
    }
    return ns;
  }

  std::uint64_t count_bucket(int length) const {
    std::uint64_t total = 0;
    for (int n : sizes_for(length)) {
      for (int m = n - 1; m <= n * (n - 1) / 2; ++m) {
        const int rest = length - graph_code_length(n, m) - 1;
        if (rest <= 0) break;
        std::uint64_t per_graph = 0;
        for (int c = mode.min_labels(); c <= n; ++c) {
          per_graph = sat_add(per_graph, sat_mul(distinct_sets(rest - c, c), falling(n, c)));
        }
        if (per_graph) total = sat_add(total, sat_mul(count_port_graphs(n, m), per_graph));
      }
    }
    return total;
  }

  // Caller holds the unique lock.
  void extend_through(int length) {
    while (first_length + static_cast<int>(buckets.size()) <= length) {
      const int l = first_length + static_cast<int>(buckets.size());
      const std::uint64_t before = buckets.empty() ? 0 : buckets.back().end;
      const std::uint64_t cnt = count_bucket(l);
      buckets.push_back({l, cnt, sat_add(before, cnt)});
    }
  }

  void extend_to_index(std::uint64_t i) {
    while (buckets.empty() || buckets.back().end < i) {
      if (!buckets.empty() && buckets.back().end == kSaturated) throw EnumerationLimit("enumeration count overflow");
      extend_through(first_length + static_cast<int>(buckets.size()));
    }
  }

  const Entries& materialize(int length) {
    auto& slot = entries[length];
    if (slot) return *slot;
    std::vector<std::pair<std::vector<std::uint8_t>, Configuration>> all;
    for (int n : sizes_for(length)) {
      for (int m = n - 1; m <= n * (n - 1) / 2; ++m) {
        const int rest = length - graph_code_length(n, m) - 1;
        if (rest <= 0) break;
        for (int c = mode.min_labels(); c <= n; ++c) {
          if (distinct_sets(rest - c, c) == 0) continue;
          const auto& graphs = graphs_cached(n, m);
          std::vector<int> labels;
          each_distinct_set(rest - c, c, 1, labels, [&] {
            std::vector<NodeId> nodes(n);
            std::iota(nodes.begin(), nodes.end(), 0);
            // Injective placements: choose ordered c-tuples of nodes.
            std::vector<NodeId> pick(c);
            std::vector<bool> used(n, false);
            std::function<void(int)> place = [&](int j) {
              if (j == c) {
                for (const auto& g : graphs) {
                  Configuration cfg{g, {}};
                  for (int t = 0; t < c; ++t) cfg.placements[labels[t]] = pick[t];
                  auto code = config_code(cfg);
                  all.push_back({std::move(code), std::move(cfg)});
                }
                return;
              }
              for (NodeId v = 0; v < n; ++v) {
                if (used[v]) continue;
                used[v] = true;
                pick[j] = v;
                place(j + 1);
                used[v] = false;
              }
            };
            place(0);
          });
        }
      }
    }
    std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    auto e = std::make_unique<Entries>();
    for (auto& [code, cfg] : all) {
      e->codes.push_back(std::move(code));
      e->configs.push_back(std::move(cfg));
    }
    slot = std::move(e);
    return *slot;
  }

  std::uint64_t before(int length) const {
    const int idx = length - first_length;
    return idx == 0 ? 0 : buckets[idx - 1].end;
  }
};

ConfigEnumerator::ConfigEnumerator(EnumMode mode) : mode_(mode), impl_(std::make_unique<Impl>()) {
  if (mode.f < 0) throw std::invalid_argument("f must be non-negative");
  if (mode.known && (mode.n < 2 || mode.n < mode.min_labels())) {
    throw std::invalid_argument("known-size enumeration needs n >= max(2, f+1)");
  }
  impl_->mode = mode;
  const int c = mode.min_labels();
  const int n0 = mode.known ? mode.n : std::max(2, c);
  impl_->first_length = graph_code_length(n0, n0 - 1) + 1 + c * (c + 1) / 2 + c;
}

ConfigEnumerator::~ConfigEnumerator() = default;

const Configuration& ConfigEnumerator::at(std::uint64_t i) const {
  if (i < 1) throw std::invalid_argument("configuration indices start at 1");
  {
    std::shared_lock lock(impl_->mu);
    if (!impl_->buckets.empty() && impl_->buckets.back().end >= i) {
      auto it = std::lower_bound(impl_->buckets.begin(), impl_->buckets.end(), i,
                                 [](const Impl::Bucket& b, std::uint64_t v) { return b.end < v; });
      if (auto e = impl_->entries.find(it->length); e != impl_->entries.end()) {
        return e->second->configs[i - 1 - impl_->before(it->length)];
      }
    }
  }
  std::unique_lock lock(impl_->mu);
  impl_->extend_to_index(i);
  auto it = std::lower_bound(impl_->buckets.begin(), impl_->buckets.end(), i,
                             [](const Impl::Bucket& b, std::uint64_t v) { return b.end < v; });
  const auto& entries = impl_->materialize(it->length);
  return entries.configs[i - 1 - impl_->before(it->length)];
}

std::uint64_t ConfigEnumerator::index_of(const Configuration& c) const {
  check_configuration(c);
  if (!passes_filter(c, mode_)) throw std::invalid_argument("configuration does not belong to this enumeration");
  const auto code = config_code(c);
  const int length = static_cast<int>(code.size());
  std::unique_lock lock(impl_->mu);
  impl_->extend_through(length);
  const auto& entries = impl_->materialize(length);
  auto it = std::lower_bound(entries.codes.begin(), entries.codes.end(), code);
  if (it == entries.codes.end() || *it != code) throw std::logic_error("configuration missing from its bucket");
  return impl_->before(length) + static_cast<std::uint64_t>(it - entries.codes.begin()) + 1;
}

std::uint64_t ConfigEnumerator::min_index_of(const Configuration& c) const {
  check_configuration(c);
  std::vector<NodeId> perm(c.graph.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::optional<std::vector<std::uint8_t>> best_code;
  Configuration best;
  do {
    Configuration p{permute(c.graph, perm), {}};
    for (const auto& [label, node] : c.placements) p.placements[label] = perm[node];
    auto code = config_code(p);
    if (!best_code || code < *best_code) {
      best_code = std::move(code);
      best = std::move(p);
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return index_of(best);
}

const ConfigEnumerator& enumerator(EnumMode mode) {
  static std::mutex mu;
  static std::map<EnumMode, std::unique_ptr<ConfigEnumerator>> table;
  std::lock_guard lock(mu);
  auto& slot = table[mode];
  if (!slot) slot = std::make_unique<ConfigEnumerator>(mode);
  return *slot;
}

NodeId target_node(const Configuration& c) {
  if (c.placements.empty()) throw std::invalid_argument("target_node: no placements");
  return c.placements.begin()->second;
}

std::optional<MoveLog> setup_path(const Configuration& c, Label l) {
  auto it = c.placements.find(l);
  if (it == c.placements.end()) return std::nullopt;
  const NodeId target = target_node(c);
  const auto dist = bfs_distances(c.graph, target);
  MoveLog path;
  NodeId v = it->second;
  while (v != target) {
    for (Port p = 0; p < c.graph.degree(v); ++p) {
      const Landing to = c.graph.traverse(v, p);
      if (dist[to.node] == dist[v] - 1) {
        path.push_back({p, to.port});
        v = to.node;
        break;
      }
    }
  }
  return path;
}

}  // namespace byzg
