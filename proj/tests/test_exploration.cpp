#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "byzg/exploration.hpp"
#include "est_oracle.hpp"

using namespace byzg;

namespace {

const PortGraph kPath2({{{1, 0}}, {{0, 0}}});

}  // namespace

TEST_CASE("small providers") {
  CHECK(uxs_for(1).steps.empty());
  CHECK(uxs_for(2).steps == std::vector<int>{0});
  CHECK(t_explo(2) == 2);
  CHECK(t_est(2) == 256);
  CHECK_THROWS_AS(uxs_for(0), std::invalid_argument);
  CHECK_THROWS_AS(uxs_for(kMaxUxsN + 1), std::invalid_argument);
}

TEST_CASE("verify_uxs on the 2-node path") {
  CHECK_FALSE(verify_uxs(Uxs{2, {0}, "exhaustive", ""}, {kPath2}));
  const auto bad = verify_uxs(Uxs{2, {}, "exhaustive", ""}, {kPath2});
  REQUIRE(bad);
  CHECK(bad->start == 0);
  CHECK(bad->unvisited == 1);
}

TEST_CASE("providers cover every graph up to N, serial and parallel agree") {
  for (int N = 2; N <= 4; ++N) {
    const auto graphs = all_graphs_up_to(N);
    CHECK_FALSE(verify_uxs(uxs_for(N), graphs));
    CHECK_FALSE(verify_uxs_parallel(uxs_for(N), graphs));
  }
  // a sequence that is too short fails identically on both routes
  const Uxs short3{3, {0}, "exhaustive", ""};
  const auto graphs = all_graphs_up_to(3);
  const auto s = verify_uxs(short3, graphs);
  const auto p = verify_uxs_parallel(short3, graphs);
  REQUIRE(s);
  REQUIRE(p);
  CHECK(s->graph_index == p->graph_index);
  CHECK(s->start == p->start);
  CHECK(s->unvisited == p->unvisited);
}

TEST_CASE("the N=3 sequence is as short as possible") {
  // degrees are at most 2, so steps modulo 2 cover every distinct walk
  const long len = uxs_for(3).length();
  const auto graphs = all_graphs_up_to(3);
  for (long shorter = 0; shorter < len; ++shorter) {
    for (long mask = 0; mask < (1L << shorter); ++mask) {
      Uxs u{3, {}, "exhaustive", ""};
      for (long b = 0; b < shorter; ++b) u.steps.push_back(static_cast<int>(mask >> b & 1));
      CHECK(verify_uxs(u, graphs));
    }
  }
}

TEST_CASE("larger providers are checked on their generated corpus") {
  const auto& u = uxs_for(5);
  CHECK(u.verified == "corpus");
  CHECK(u.corpus_hash == uxs_corpus_hash(5));
  CHECK_FALSE(verify_uxs(u, uxs_corpus(5)));
}

TEST_CASE("explo_step and explo_record") {
  const Uxs first{2, {0}, "exhaustive", ""};
  ExploWalk w;
  CHECK(explo_step(w, first, 1) == 0);
  explo_record(w, 0, 0);
  CHECK(w.log == MoveLog{{0, 0}});
  CHECK_THROWS_AS(explo_step(w, first, 1), std::logic_error);

  const Uxs one{2, {1}, "exhaustive", ""};
  ExploWalk w2;
  w2.last_entry = 1;
  CHECK(explo_step(w2, one, 2) == 0);
}

TEST_CASE("backtrack_plan reverses the log") {
  CHECK(backtrack_plan({{0, 1}}) == std::vector<Port>{1});
  CHECK(backtrack_plan({}).empty());
  CHECK(backtrack_plan({{0, 1}, {2, 0}}) == std::vector<Port>{0, 1});
}

TEST_CASE("EST' on the 2-node path finishes with the right size") {
  const auto out = test::drive_est(kPath2, 0, 2);
  CHECK(out.status == EstStatus::kFinished);
  CHECK(out.learned == 2);
  CHECK(out.problem.empty());
}

TEST_CASE("EST' on a 3-ring fails under a size-4 hypothesis") {
  const auto ring = generate(GraphKind::kRing, {3, 0});
  const auto out = test::drive_est(ring, 0, 4);
  CHECK(out.status == EstStatus::kFailed);
  CHECK_FALSE(out.learned);
}

TEST_CASE("EST' matches BFS on every graph up to 4 nodes and every root") {
  long runs = 0;
  long max_rounds = 0;
  for (const auto& g : all_graphs_up_to(4)) {
    if (g.size() < 2) continue;
    for (NodeId root = 0; root < g.size(); ++root) {
      const auto out = test::drive_est(g, root, g.size());
      ++runs;
      max_rounds = std::max(max_rounds, out.rounds);
      CHECK(out.status == EstStatus::kFinished);
      CHECK(out.learned == g.size());
      CHECK_MESSAGE(out.problem.empty(), out.problem);
      CHECK(out.rounds < t_est(g.size()));
    }
  }
  CHECK(runs > 0);
  MESSAGE("EST' runs: " << runs << ", longest " << max_rounds << " rounds");
}

TEST_CASE("EST' is deterministic") {
  const auto g = generate(GraphKind::kStar, {4, 0});
  const auto a = test::drive_est(g, 2, 4);
  const auto b = test::drive_est(g, 2, 4);
  CHECK(a.moves == b.moves);
  CHECK(a.status == b.status);
}

TEST_CASE("EST' with a wrong smaller hypothesis never reports success") {
  for (const auto& g : all_graphs_up_to(4)) {
    if (g.size() < 3) continue;
    for (NodeId root = 0; root < g.size(); ++root) {
      const auto out = test::drive_est(g, root, g.size() - 1);
      CHECK(out.status == EstStatus::kFailed);
    }
  }
}
