#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "byzg/config_space.hpp"

using namespace byzg;

namespace {

// Every configuration on graphs of size <= max_n whose labels come from
// {1..max_label}; the brute-force oracle for the head of each enumeration.
std::vector<Configuration> small_configs(int min_n, int max_n, int max_label) {
  std::vector<Configuration> out;
  for (int n = min_n; n <= max_n; ++n) {
    for (const auto& g : all_port_graphs(n)) {
      // every partial injection labels -> nodes
      std::function<void(int, Configuration&, std::vector<bool>&)> rec = [&](int l, Configuration& c,
                                                                              std::vector<bool>& used) {
        if (l > max_label) {
          if (!c.placements.empty()) out.push_back(c);
          return;
        }
        rec(l + 1, c, used);
        for (NodeId v = 0; v < n; ++v) {
          if (used[v]) continue;
          used[v] = true;
          c.placements[l] = v;
          rec(l + 1, c, used);
          c.placements.erase(l);
          used[v] = false;
        }
      };
      Configuration c{g, {}};
      std::vector<bool> used(n, false);
      rec(1, c, used);
    }
  }
  return out;
}

Configuration brute_first(EnumMode mode, int max_n, int max_label) {
  std::optional<Configuration> best;
  for (const auto& c : small_configs(2, max_n, max_label)) {
    if (!passes_filter(c, mode)) continue;
    if (!best || config_code(c) < config_code(*best)) best = c;
  }
  REQUIRE(best);
  return *best;
}

// Lexicographically smallest among the shortest port sequences from `from`
// to `to`, with entry ports, by exhaustive search over sequences.
MoveLog brute_path(const PortGraph& g, NodeId from, NodeId to) {
  for (int len = 0; len <= g.size(); ++len) {
    std::optional<MoveLog> best;
    std::function<void(NodeId, MoveLog&)> rec = [&](NodeId v, MoveLog& acc) {
      if (static_cast<int>(acc.size()) == len) {
        if (v != to) return;
        auto key = [](const MoveLog& m) {
          std::vector<int> k;
          for (const auto& x : m) k.push_back(x.exit);
          return k;
        };
        if (!best || key(acc) < key(*best)) best = acc;
        return;
      }
      for (Port p = 0; p < g.degree(v); ++p) {
        const Landing l = g.traverse(v, p);
        acc.push_back({p, l.port});
        rec(l.node, acc);
        acc.pop_back();
      }
    };
    MoveLog acc;
    rec(from, acc);
    if (best) return *best;
  }
  FAIL("no path");
  return {};
}

}  // namespace

TEST_CASE("first known configuration") {
  const auto& c = enumerate_known(2, 0, 1);
  const Configuration want{generate(GraphKind::kPath, {2, 0}), {{1, 0}}};
  CHECK(c == want);
  CHECK(c == brute_first(EnumMode::Known(2, 0), 2, 3));
}

TEST_CASE("first unknown configuration") {
  const auto& c = enumerate_unknown(0, 1);
  const Configuration want{generate(GraphKind::kPath, {2, 0}), {{1, 0}, {2, 1}}};
  CHECK(c == want);
  CHECK(c == brute_first(EnumMode::Unknown(0), 3, 3));
}

TEST_CASE("enumeration is strictly increasing in shortlex code and round-trips") {
  for (auto mode : {EnumMode::Known(3, 0), EnumMode::Known(3, 1), EnumMode::Known(4, 1), EnumMode::Unknown(0),
                    EnumMode::Unknown(1)}) {
    const auto& e = enumerator(mode);
    for (std::uint64_t i = 1; i <= 400; ++i) {
      const auto& c = e.at(i);
      CHECK(passes_filter(c, mode));
      CHECK(e.index_of(c) == i);
      if (i > 1) CHECK(shortlex_less(config_code(e.at(i - 1)), config_code(c)));
    }
  }
}

TEST_CASE("the enumeration head lists every small configuration in code order") {
  const EnumMode mode = EnumMode::Known(3, 0);
  auto all = small_configs(3, 3, 2);
  all.erase(std::remove_if(all.begin(), all.end(), [&](const Configuration& c) { return !passes_filter(c, mode); }),
            all.end());
  std::sort(all.begin(), all.end(),
            [](const Configuration& a, const Configuration& b) { return shortlex_less(config_code(a), config_code(b)); });
  // brute-force members keep their relative order in the enumeration
  const auto& e = enumerator(mode);
  std::uint64_t last = 0;
  for (const auto& c : all) {
    const auto i = e.index_of(c);
    CHECK(i > last);
    last = i;
  }
}

TEST_CASE("index_of rejects configurations outside the mode") {
  const Configuration one{generate(GraphKind::kPath, {2, 0}), {{1, 0}}};
  CHECK_THROWS_AS(index_of(one, EnumMode::Unknown(0)), std::invalid_argument);
  CHECK_THROWS_AS(index_of(one, EnumMode::Known(3, 0)), std::invalid_argument);
  const Configuration shared{generate(GraphKind::kPath, {2, 0}), {{1, 0}, {2, 0}}};
  CHECK_THROWS_AS(check_configuration(shared), std::invalid_argument);
}

TEST_CASE("min_index_of matches brute force over relabelings") {
  const EnumMode mode = EnumMode::Known(4, 1);
  const auto& e = enumerator(mode);
  for (std::uint64_t i : {1ull, 7ull, 50ull, 333ull, 2000ull}) {
    const auto& c = e.at(i);
    std::vector<NodeId> perm(c.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::uint64_t best = UINT64_MAX;
    do {
      Configuration p{permute(c.graph, perm), {}};
      for (const auto& [l, v] : c.placements) p.placements[l] = perm[v];
      best = std::min(best, e.index_of(p));
    } while (std::next_permutation(perm.begin(), perm.end()));
    CHECK(e.min_index_of(c) == best);
    CHECK(best <= i);
  }
}

TEST_CASE("target_node is the node of the smallest label") {
  const auto g = generate(GraphKind::kPath, {4, 0});
  CHECK(target_node({g, {{2, 3}, {7, 1}}}) == 3);
  CHECK(target_node({g, {{5, 2}}}) == 2);
}

TEST_CASE("setup_path") {
  const auto g = generate(GraphKind::kPath, {3, 0});
  const Configuration c{g, {{2, 0}, {4, 2}}};
  CHECK(setup_path(c, 2) == MoveLog{});
  CHECK_FALSE(setup_path(c, 3));
  for (int n = 2; n <= 4; ++n) {
    for (const auto& pg : all_port_graphs(n)) {
      for (NodeId a = 0; a < n; ++a) {
        for (NodeId b = 0; b < n; ++b) {
          if (a == b) continue;
          const Configuration cc{pg, {{1, a}, {2, b}}};
          CHECK(setup_path(cc, 2) == brute_path(pg, b, a));
        }
      }
    }
  }
}

TEST_CASE("graph counts by edge number") {
  CHECK(count_port_graphs(2, 1) == 1);
  CHECK(count_port_graphs(3, 2) == 6);
  CHECK(count_port_graphs(3, 3) == 8);
  for (int m = 3; m <= 6; ++m) CHECK(count_port_graphs(4, m) == all_port_graphs(4, m).size());
}
