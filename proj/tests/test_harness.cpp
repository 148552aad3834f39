#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "byzg/monitors.hpp"
#include "support.hpp"

using namespace byzg;

namespace {

std::vector<std::string> ids(const Expansion& e) {
  std::vector<std::string> out;
  for (const auto& x : e.entries) out.push_back(x.scenario.id);
  return out;
}

// First round of every phase of one agent, read from a trace.
std::map<std::uint64_t, Round> phase_starts(const ParsedTrace& t, int agent) {
  std::map<std::uint64_t, Round> out;
  for (const auto& e : t.entries) {
    const auto& a = e.record.agents.at(agent);
    if (!a.truth || a.truth->phase == 0) continue;
    out.emplace(a.truth->phase, e.record.r);
  }
  return out;
}

}  // namespace

TEST_CASE("expansion sizes") {
  const auto spec = load_corpus("scenarios/four.json");
  const auto e = expand(spec);
  CHECK(e.entries.size() == 4);
  CHECK(e.skipped.empty());
  CHECK(ids(e) == ids(expand(spec)));
  for (std::size_t i = 0; i < e.entries.size(); ++i) {
    CHECK(e.entries[i].scenario.seed == expand(spec).entries[i].scenario.seed);
  }

  auto empty = spec;
  empty.graphs.clear();
  CHECK(expand(empty).entries.empty());
}

TEST_CASE("expansion layout") {
  auto spec = load_corpus("scenarios/four.json");
  spec.schedules = {"simultaneous", "staggered", "contact_only"};
  spec.sizes = {2, 3};
  const auto e = expand(spec);
  for (const auto& x : e.entries) {
    const auto& sc = x.scenario;
    CHECK(sc.good_count() == sc.f + 1);
    int byz = 0;
    for (const auto& a : sc.agents) byz += a.good ? 0 : 1;
    CHECK(byz == std::min(sc.f, sc.n() - sc.good_count()));
    CHECK(sc.max_rounds == liveness_bound_upfront(sc) + 1);
    if (x.schedule == "contact_only") CHECK_FALSE(sc.agents[sc.good_count() - 1].wake);
  }
  // n=2, f=1 leaves no node for a Byzantine agent: one scenario per schedule,
  // and only the path exists at n=2
  int collapsed = 0;
  for (const auto& x : e.entries) collapsed += x.strategy == "none" ? 1 : 0;
  CHECK(collapsed == 3);
  CHECK_FALSE(e.skipped.empty());
}

TEST_CASE("skip rules") {
  auto spec = load_corpus("scenarios/four.json");
  spec.skips.push_back({3, 1, {"tower_forger"}, "testing"});
  const auto e = expand(spec);
  CHECK(e.entries.size() == 2);
  REQUIRE(e.skipped.size() == 2);
  CHECK(e.skipped[0].reason == "testing");
}

TEST_CASE("unknown corpus uses k = f+2") {
  auto spec = load_corpus("corpus/unknown.json");
  for (const auto& x : expand(spec).entries) CHECK(x.scenario.good_count() == x.scenario.f + 2);
}

TEST_CASE("bound for the first configuration") {
  const auto& c = enumerate_known(2, 0, 1);
  Scenario sc = test::scenario(c.graph, true, 0, {});
  for (const auto& [l, v] : c.placements) sc.agents.push_back(test::good(l, v));
  CHECK(true_index(sc) == 1);
  CHECK(liveness_bound(sc, {Round(0)}) == 2 * t_explo(2) + q_duration(2));
  CHECK(liveness_bound(sc, {Round(9)}) == 9 + 2 * t_explo(2) + q_duration(2));
}

TEST_CASE("true index is the smallest over relabelings") {
  const auto sc = load_scenario("scenarios/ring3_pair.json");
  Configuration c{sc.graph, {{1, 0}, {2, 1}}};
  const auto i = true_index(sc);
  CHECK(i == enumerator(EnumMode::Known(3, 0)).min_index_of(c));
  CHECK(i <= index_of(c, EnumMode::Known(3, 0)));
}

TEST_CASE("unknown phase starts follow Q_{j+1} = Q_j + Z(n_j, Q_j)") {
  auto sc = test::scenario(test::ring3(), false, 0, {test::good(1, 0), test::good(2, 1)});
  const auto c = test::capture(sc);
  REQUIRE(c.result.verdict.kind == Verdict::Kind::kAllDeclared);
  const auto t = test::parse_lines(c.lines);
  for (int agent = 0; agent < 2; ++agent) {
    const auto starts = phase_starts(t, agent);
    CHECK(starts.size() >= 2);
    for (const auto& [p, r] : starts) CHECK(r - *c.result.wake_rounds[agent] == unknown_q(0, p));
  }
}

TEST_CASE("known phase starts are 2P(n) + (i-1) Q(n) after waking") {
  auto sc = test::scenario(generate(GraphKind::kStar, {4, 0}), true, 1,
                           {test::good(1, 1), test::good(2, 2, Round(3)), test::byz(3, 0, "label_thief")});
  const auto c = test::capture(sc);
  REQUIRE(c.result.verdict.kind == Verdict::Kind::kAllDeclared);
  const auto t = test::parse_lines(c.lines);
  const Round part1 = 2 * uxs_for(4).length();
  for (int agent = 0; agent < 2; ++agent) {
    for (const auto& [p, r] : phase_starts(t, agent)) {
      CHECK(r - *c.result.wake_rounds[agent] == part1 + Round(p - 1) * q_duration(4));
    }
  }
}

TEST_CASE("ideal oracle on the solo and 3-ring scenarios") {
  for (const char* path : {"scenarios/solo_path2.json", "scenarios/ring3_pair.json"}) {
    const auto sc = load_scenario(path);
    const auto p = oracle_ideal(sc);
    const auto t = test::parse_lines(test::capture(sc).lines);
    std::string detail;
    const auto o = check_ideal(t, p, &detail);
    CHECK_MESSAGE(o != IdealOutcome::kViolated, detail);
    CHECK(p.target == 0);
  }
  CHECK_THROWS_AS(oracle_ideal(load_scenario("scenarios/scripted_forger.json")), std::invalid_argument);
}

TEST_CASE("batch keeps entry order and writes one row per scenario") {
  const auto e = expand(load_corpus("scenarios/four.json"));
  BatchOptions par, ser;
  ser.parallel = false;
  const auto a = run_batch(e.entries, par);
  const auto b = run_batch(e.entries, ser);
  REQUIRE(a.size() == 4);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].id == e.entries[i].scenario.id);
    CHECK(a[i].trace_hash == b[i].trace_hash);
    CHECK(a[i].verdict.kind == Verdict::Kind::kAllDeclared);
    CHECK(a[i].margin);
    CHECK(*a[i].margin >= 0);
  }
  const auto dir = std::filesystem::temp_directory_path() / "byzg_harness_batch";
  std::filesystem::create_directories(dir);
  write_summary_csv(a, (dir / "summary.csv").string());
  std::ifstream in(dir / "summary.csv");
  std::string line;
  int rows = 0;
  std::getline(in, line);
  CHECK(line.rfind("scenario_id,", 0) == 0);
  while (std::getline(in, line)) rows += line.empty() ? 0 : 1;
  CHECK(rows == 4);
  const auto j = summary_json(a, e.skipped);
  CHECK(j.at("scenarios").size() == 4);
  std::filesystem::remove_all(dir);
}

TEST_CASE("scenario files round-trip") {
  const auto sc = load_scenario("scenarios/ring3_pair.json");
  const auto back = scenario_from_json(scenario_to_json(sc));
  CHECK(back.graph == sc.graph);
  CHECK(back.agents.size() == sc.agents.size());
  CHECK(format_header(back) == format_header(sc));
  CHECK_THROWS_AS(load_scenario("scenarios/missing.json"), std::invalid_argument);
}
