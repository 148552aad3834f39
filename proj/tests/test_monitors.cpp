#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "byzg/monitors.hpp"
#include "support.hpp"

using namespace byzg;

namespace {

AgentRecord agent(int id, NodeId node, Tag tag, std::uint64_t phase, Action act = Action::Stay(), int n_i = 2) {
  AgentRecord a;
  a.id = id;
  a.node = node;
  Claim c;
  c.label = id + 1;
  c.tag = tag;
  c.phase = phase;
  if (tag == Tag::kTower) c.index = 0;
  a.claim = c;
  a.action = act;
  a.truth = Truth{tag, Color::kNone, phase, n_i};
  return a;
}

AgentRecord dormant(int id, NodeId node) {
  AgentRecord a;
  a.id = id;
  a.node = node;
  a.dormant = true;
  return a;
}

MonitorContext ctx(bool known, int n, int f, std::vector<bool> good) { return {known, n, f, std::move(good)}; }

std::optional<MonitorViolation> feed(Monitors& m, const std::vector<RoundRecord>& recs) {
  for (const auto& r : recs) {
    if (auto v = m.on_round(r)) return v;
  }
  return std::nullopt;
}

}  // namespace

TEST_CASE("simultaneity") {
  Monitors m(ctx(true, 3, 0, {true, true}), {MonitorKind::kSimultaneity});
  const RoundRecord split{7, {agent(0, 1, Tag::kTower, 1, Action::Declare()), agent(1, 2, Tag::kTower, 1)}};
  const auto v = feed(m, {split});
  REQUIRE(v);
  CHECK(v->monitor == "simultaneity");
  CHECK(v->round == 7);

  Monitors ok(ctx(true, 3, 0, {true, true}), {MonitorKind::kSimultaneity});
  CHECK_FALSE(feed(ok, {{0, {agent(0, 1, Tag::kTower, 1), agent(1, 2, Tag::kTower, 1)}},
                        {1, {agent(0, 1, Tag::kTower, 1, Action::Declare()),
                             agent(1, 1, Tag::kTower, 1, Action::Declare())}}}));

  // a Byzantine agent not declaring is irrelevant
  Monitors byz(ctx(true, 3, 1, {true, false}), {MonitorKind::kSimultaneity});
  CHECK_FALSE(feed(byz, {{0, {agent(0, 1, Tag::kTower, 1, Action::Declare()), agent(1, 2, Tag::kTower, 1)}}}));
}

TEST_CASE("single tower") {
  Monitors m(ctx(true, 3, 0, {true, true}), {MonitorKind::kSingleTower});
  const auto v = feed(m, {{0, {agent(0, 0, Tag::kTower, 1), agent(1, 1, Tag::kTower, 1)}}});
  REQUIRE(v);
  CHECK(v->monitor == "single_tower");

  Monitors solo(ctx(true, 2, 0, {true}), {MonitorKind::kSingleTower});
  CHECK_FALSE(feed(solo, {{0, {agent(0, 0, Tag::kTower, 1)}}}));

  // with f=1 a lone forged tower claim is not a tower
  Monitors f1(ctx(true, 3, 1, {true, true, false}), {MonitorKind::kSingleTower});
  CHECK_FALSE(feed(f1, {{0, {agent(0, 0, Tag::kTower, 1), agent(1, 0, Tag::kTower, 1), agent(2, 2, Tag::kTower, 1)}}}));
}

TEST_CASE("phase timing") {
  const Round q = q_duration(2);
  auto phases = [&](Round second_start) {
    std::vector<RoundRecord> recs;
    recs.push_back({0, {agent(0, 0, Tag::kPart1, 0)}});
    recs.push_back({2, {agent(0, 0, Tag::kSetup, 1)}});
    recs.push_back({2 + second_start, {agent(0, 0, Tag::kSetup, 2)}});
    recs.push_back({2 + second_start + 5, {agent(0, 0, Tag::kTower, 2, Action::Declare())}});
    return recs;
  };
  Monitors ok(ctx(true, 2, 0, {true}), {MonitorKind::kPhaseTiming});
  CHECK_FALSE(feed(ok, phases(q)));
  CHECK(ok.phases_checked() == 1);  // the declaring phase is never closed

  Monitors off(ctx(true, 2, 0, {true}), {MonitorKind::kPhaseTiming});
  const auto v = feed(off, phases(q - 1));
  REQUIRE(v);
  CHECK(v->monitor == "phase_timing");

  Monitors jump(ctx(true, 2, 0, {true}), {MonitorKind::kPhaseTiming});
  CHECK(feed(jump, {{0, {agent(0, 0, Tag::kSetup, 1)}}, {1, {agent(0, 0, Tag::kSetup, 3)}}}));

  // unknown mode: phase i lasts Z(n_i, Q) with Q the rounds before it
  const Round z1 = z_duration(2, 0);
  const Round z2 = z_duration(3, z1);
  Monitors un(ctx(false, 3, 0, {true}), {MonitorKind::kPhaseTiming});
  CHECK_FALSE(feed(un, {{0, {agent(0, 0, Tag::kSetup, 1, Action::Stay(), 2)}},
                        {z1, {agent(0, 0, Tag::kSetup, 2, Action::Stay(), 3)}},
                        {z1 + z2, {agent(0, 0, Tag::kSetup, 3, Action::Stay(), 3)}}}));
  CHECK(un.phases_checked() == 2);
}

TEST_CASE("wake delay") {
  const Round bound = wake_bound(true, 2, 0);
  CHECK(bound == t_explo(2));
  auto recs = [&](Round late) {
    return std::vector<RoundRecord>{{0, {agent(0, 0, Tag::kPart1, 0), dormant(1, 1)}},
                                    {late, {agent(0, 0, Tag::kPart1, 0), agent(1, 1, Tag::kPart1, 0)}}};
  };
  Monitors ok(ctx(true, 2, 0, {true, true}), {MonitorKind::kWakeDelay});
  CHECK_FALSE(feed(ok, recs(bound)));
  Monitors late(ctx(true, 2, 0, {true, true}), {MonitorKind::kWakeDelay});
  const auto v = feed(late, recs(bound + 1));
  REQUIRE(v);
  CHECK(v->monitor == "wake_delay");
  Monitors solo(ctx(true, 2, 0, {true}), {MonitorKind::kWakeDelay});
  CHECK_FALSE(feed(solo, {{0, {agent(0, 0, Tag::kPart1, 0)}}, {50, {agent(0, 0, Tag::kTower, 3)}}}));
}

TEST_CASE("size learning") {
  auto recs = [](int n_i) {
    return std::vector<RoundRecord>{{0, {agent(0, 0, Tag::kToken, 4, Action::Stay(), n_i)}},
                                    {1, {agent(0, 0, Tag::kTower, 4, Action::Stay(), n_i)}}};
  };
  Monitors wrong(ctx(false, 3, 0, {true}), {MonitorKind::kSizeLearning});
  const auto v = feed(wrong, recs(2));
  REQUIRE(v);
  CHECK(v->monitor == "size_learning");
  Monitors right(ctx(false, 3, 0, {true}), {MonitorKind::kSizeLearning});
  CHECK_FALSE(feed(right, recs(3)));
  Monitors known(ctx(true, 3, 0, {true}), {MonitorKind::kSizeLearning});
  CHECK_FALSE(feed(known, recs(2)));
  // entering tower from wait-for-a-tower is not a size claim
  Monitors wft(ctx(false, 3, 0, {true}), {MonitorKind::kSizeLearning});
  CHECK_FALSE(feed(wft, {{0, {agent(0, 0, Tag::kWaitForTower, 4, Action::Stay(), 2)}},
                         {1, {agent(0, 0, Tag::kTower, 4, Action::Stay(), 2)}}}));
}

TEST_CASE("replayed traces: corpus runs pass, the synthetic two-tower trace fails") {
  std::ifstream in("scenarios/two_towers.trace.jsonl");
  const auto bad = parse_trace(in);
  CHECK(monitor_single_tower(bad));
  CHECK_FALSE(monitor_simultaneity(bad));

  const auto sc = load_scenario("scenarios/scripted_forger.json");
  const auto t = test::parse_lines(test::capture(sc).lines);
  CHECK(check_trace(t).empty());
  CHECK_FALSE(monitor_phase_timing(t));
  CHECK_FALSE(monitor_wake_delay(t));
}

TEST_CASE("a run without any declaration is vacuously simultaneous") {
  auto sc = test::scenario(test::ring3(), true, 0, {test::good(1, 0), test::good(2, 1)});
  sc.max_rounds = Round(20);
  const auto t = test::parse_lines(test::capture(sc).lines);
  CHECK(t.verdict->kind == Verdict::Kind::kMaxRounds);
  CHECK_FALSE(monitor_simultaneity(t));
}
