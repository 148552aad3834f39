#pragma once

// Small builders shared by the unit tests.

#include <sstream>
#include <string>
#include <vector>

#include "byzg/engine.hpp"
#include "byzg/harness.hpp"

namespace byzg::test {

inline PortGraph path2() { return generate(GraphKind::kPath, {2, 0}); }
inline PortGraph ring3() { return generate(GraphKind::kRing, {3, 0}); }

inline AgentSpec good(Label l, NodeId start, std::optional<Round> wake = Round(0)) {
  AgentSpec a;
  a.label = l;
  a.start = start;
  a.wake = std::move(wake);
  return a;
}

inline AgentSpec byz(Label l, NodeId start, const std::string& strategy) {
  AgentSpec a;
  a.label = l;
  a.start = start;
  a.good = false;
  a.wake.reset();
  a.strategy.name = strategy;
  return a;
}

inline Scenario scenario(PortGraph g, bool known, int f, std::vector<AgentSpec> agents, std::uint64_t seed = 1) {
  Scenario sc;
  sc.graph = std::move(g);
  sc.known = known;
  sc.f = f;
  sc.agents = std::move(agents);
  sc.seed = seed;
  return sc;
}

struct Captured {
  RunResult result;
  std::vector<std::string> lines;
};

inline Captured capture(const Scenario& sc, bool fast_forward = true) {
  MemorySink sink;
  RunOptions o;
  o.fast_forward = fast_forward;
  o.sink = &sink;
  Captured c;
  c.result = run(sc, o);
  c.lines = std::move(sink.lines);
  return c;
}

inline ParsedTrace parse_lines(const std::vector<std::string>& lines) {
  std::string all;
  for (const auto& l : lines) all += l + "\n";
  std::istringstream in(all);
  return parse_trace(in);
}

// Replaces every span line by copies of the round line before it, giving the
// trace a run without fast-forward would write.
inline std::vector<std::string> expand_spans(const std::vector<std::string>& lines) {
  std::vector<std::string> out;
  nlohmann::ordered_json last;
  for (const auto& l : lines) {
    const auto j = nlohmann::json::parse(l);
    if (j.at("type") == "span") {
      for (Round r = round_from_json(j.at("from")); r <= round_from_json(j.at("to")); ++r) {
        last["r"] = round_to_json(r);
        out.push_back(last.dump());
      }
      continue;
    }
    if (j.at("type") == "round") last = nlohmann::ordered_json::parse(l);
    out.push_back(l);
  }
  return out;
}

}  // namespace byzg::test
