#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "byzg/monitors.hpp"
#include "support.hpp"

using namespace byzg;

namespace {

std::vector<std::string> round_lines(const std::vector<std::string>& lines) {
  std::vector<std::string> out;
  for (const auto& l : lines) {
    if (l.rfind("{\"type\":\"round\"", 0) == 0) out.push_back(l);
  }
  return out;
}

}  // namespace

TEST_CASE("solo agent on the 2-node path declares") {
  const auto sc = test::scenario(test::path2(), true, 0, {test::good(1, 0)});
  const auto c = test::capture(sc);
  CHECK(c.result.verdict.kind == Verdict::Kind::kAllDeclared);
  CHECK(c.result.verdict.round <= liveness_bound(sc, c.result.wake_rounds));
  const auto t = test::parse_lines(c.lines);
  REQUIRE(t.verdict);
  CHECK(t.verdict->round == c.result.verdict.round);
  const auto& last = t.entries.back().record;
  CHECK(last.agents[0].action.kind == Action::Kind::kDeclare);
  CHECK(last.agents[0].claim->tag == Tag::kTower);
}

TEST_CASE("two agents on a 3-ring declare together") {
  const auto sc = load_scenario("scenarios/ring3_pair.json");
  const auto c = test::capture(sc);
  REQUIRE(c.result.verdict.kind == Verdict::Kind::kAllDeclared);
  const auto& last = test::parse_lines(c.lines).entries.back().record;
  CHECK(last.r == c.result.verdict.round);
  for (const auto& a : last.agents) {
    CHECK(a.action.kind == Action::Kind::kDeclare);
    CHECK(a.node == c.result.verdict.node);
  }
}

TEST_CASE("same scenario and seed give identical traces") {
  auto sc = test::scenario(generate(GraphKind::kStar, {4, 0}), true, 1,
                           {test::good(1, 0), test::good(2, 1, Round(1)), test::byz(3, 2, "random_walker")}, 77);
  const auto a = test::capture(sc), b = test::capture(sc);
  CHECK(a.lines == b.lines);
  sc.seed = 78;
  const auto d = test::capture(sc);
  CHECK(d.lines != a.lines);
}

TEST_CASE("fast-forward writes the same rounds as stepping every round") {
  CorpusSpec spec = load_corpus("corpus/known.json");
  spec.sizes = {2, 3};
  int compared = 0;
  for (const auto& e : expand(spec).entries) {
    const auto fast = test::capture(e.scenario, true);
    const auto slow = test::capture(e.scenario, false);
    CHECK(fast.result.verdict.kind == slow.result.verdict.kind);
    CHECK(fast.result.verdict.round == slow.result.verdict.round);
    CHECK_MESSAGE(test::expand_spans(fast.lines) == slow.lines, e.scenario.id);
    ++compared;
  }
  CHECK(compared > 20);

  auto un = test::scenario(test::path2(), false, 0, {test::good(1, 0), test::good(2, 1, Round(1))});
  const auto fast = test::capture(un, true);
  const auto slow = test::capture(un, false);
  CHECK(fast.result.stats.stepped_rounds < slow.result.stats.stepped_rounds);
  CHECK(test::expand_spans(fast.lines) == slow.lines);
}

TEST_CASE("a dormant agent wakes when another agent reaches its node") {
  const auto sc = test::scenario(test::path2(), true, 0, {test::good(1, 0), test::good(2, 1, std::nullopt)});
  const auto c = test::capture(sc);
  REQUIRE(c.result.wake_rounds.size() == 2);
  CHECK(c.result.wake_rounds[0] == Round(0));
  CHECK(c.result.wake_rounds[1] == Round(1));
  const auto t = test::parse_lines(c.lines);
  CHECK(t.entries[0].record.agents[1].dormant);
  // the woken agent acts in the round it is woken
  CHECK_FALSE(t.entries[1].record.agents[1].dormant);
  CHECK(t.entries[1].record.agents[1].claim);
  CHECK(c.result.verdict.kind == Verdict::Kind::kAllDeclared);
}

TEST_CASE("scenario validation") {
  auto base = [] {
    return test::scenario(generate(GraphKind::kPath, {3, 0}), true, 1, {test::good(1, 0), test::good(2, 1)});
  };
  CHECK_NOTHROW(validate(base()));
  auto dup_label = base();
  dup_label.agents[1].label = 1;
  CHECK_THROWS_AS(validate(dup_label), ScenarioError);
  auto dup_start = base();
  dup_start.agents[1].start = 0;
  CHECK_THROWS_AS(validate(dup_start), ScenarioError);
  auto off_graph = base();
  off_graph.agents[1].start = 3;
  CHECK_THROWS_AS(validate(off_graph), ScenarioError);
  auto nobody = base();
  for (auto& a : nobody.agents) a.wake.reset();
  CHECK_THROWS_AS(validate(nobody), ScenarioError);
  auto too_many = base();
  too_many.agents.push_back(test::byz(3, 2, "sleeper"));
  too_many.f = 0;
  CHECK_THROWS_AS(validate(too_many), ScenarioError);
  auto bad_label = base();
  bad_label.agents[0].label = 0;
  CHECK_THROWS_AS(validate(bad_label), ScenarioError);
  auto broken = base();
  broken.graph = PortGraph({{{1, 0}}, {{0, 1}}, {}});
  CHECK_THROWS_AS(validate(broken), ScenarioError);
}

TEST_CASE("Byzantine moves through missing ports become stays") {
  const auto sc = load_scenario("scenarios/scripted_forger.json");
  const auto c = test::capture(sc);
  CHECK(c.result.stats.clamped_moves == 1);
  const auto t = test::parse_lines(c.lines);
  const auto& byz = t.entries[0].record.agents[2];
  CHECK(byz.clamped);
  CHECK(byz.action.kind == Action::Kind::kStay);
  CHECK(t.entries[1].record.agents[2].node == byz.node);
  CHECK(c.result.verdict.kind == Verdict::Kind::kAllDeclared);
}

TEST_CASE("max_rounds stops the run") {
  auto sc = test::scenario(test::path2(), true, 0, {test::good(1, 0)});
  sc.max_rounds = Round(5);
  const auto c = test::capture(sc);
  CHECK(c.result.verdict.kind == Verdict::Kind::kMaxRounds);
  CHECK(c.result.verdict.round == 5);
  CHECK(exit_code(c.result.verdict.kind) == 3);
  CHECK(round_lines(test::expand_spans(c.lines)).size() == 5);
}

TEST_CASE("trace lines round-trip") {
  const auto sc = load_scenario("scenarios/scripted_forger.json");
  const auto c = test::capture(sc);
  const auto t = test::parse_lines(c.lines);
  CHECK(t.header.at("scenario") == sc.id);
  std::size_t i = 0;
  for (const auto& l : round_lines(c.lines)) {
    while (i < t.entries.size() && format_round(t.entries[i].record) != l) ++i;
    CHECK(i < t.entries.size());
  }
  CHECK(round_from_json(round_to_json(Round(1) << 70)) == (Round(1) << 70));
  CHECK(round_to_json(Round(12)).is_number());
  CHECK(round_to_json(Round(1) << 70).is_string());
  CHECK(parse_verdict_kind("AllDeclared") == Verdict::Kind::kAllDeclared);
  CHECK_FALSE(parse_verdict_kind("Maybe"));
}

TEST_CASE("file and hash sinks see the same bytes") {
  const auto sc = load_scenario("scenarios/ring3_pair.json");
  const auto path = std::filesystem::temp_directory_path() / "byzg_engine_trace.jsonl";
  HashSink h;
  {
    FileSink f(path.string());
    TeeSink both({&f, &h});
    RunOptions o;
    o.sink = &both;
    run(sc, o);
  }
  std::ifstream in(path, std::ios::binary);
  const std::string bytes((std::istreambuf_iterator<char>(in)), {});
  CHECK(bytes.size() == h.bytes());
  HashSink again;
  std::size_t start = 0;
  for (std::size_t p; (p = bytes.find('\n', start)) != std::string::npos; start = p + 1) {
    again.line(std::string_view(bytes).substr(start, p - start));
  }
  CHECK(again.hash() == h.hash());
  std::filesystem::remove(path);
}
