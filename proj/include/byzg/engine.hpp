#pragma once

// Synchronous round loop, trace records and sinks.

#include <cstdint>
#include <fstream>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "byzg/adversary.hpp"
#include "byzg/claim.hpp"
#include "byzg/protocol.hpp"

namespace byzg {

struct AgentSpec {
  Label label = 1;
  NodeId start = 0;
  bool good = true;
  std::optional<Round> wake;  // good agents; empty means woken by contact only
  StrategySpec strategy;      // Byzantine agents
};

struct Scenario {
  std::string id = "scenario";
  PortGraph graph;
  bool known = true;
  int f = 0;
  std::vector<AgentSpec> agents;
  std::uint64_t seed = 0;
  std::uint64_t cap = 100000;       // last phase an agent may start
  std::optional<Round> max_rounds;  // first round that is not simulated

  int n() const { return graph.size(); }
  int good_count() const;
};

struct ScenarioError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Throws ScenarioError on any broken model rule.
void validate(const Scenario& sc);

struct AgentRecord {
  int id = 0;
  NodeId node = 0;
  bool dormant = false;
  std::optional<Claim> claim;
  Action action;
  bool clamped = false;  // Byzantine move to a nonexistent port, turned into a stay
  std::optional<Truth> truth;
};

struct RoundRecord {
  Round r = 0;
  std::vector<AgentRecord> agents;
};

struct Verdict {
  enum class Kind { kAllDeclared, kCapExceeded, kMaxRounds, kMonitorViolation };
  Kind kind = Kind::kMaxRounds;
  Round round = 0;
  NodeId node = 0;          // AllDeclared
  std::string monitor;      // MonitorViolation
  std::string detail;
};

const char* to_string(Verdict::Kind k);
std::optional<Verdict::Kind> parse_verdict_kind(const std::string& s);
/// CLI exit code: 0 AllDeclared, 2 MonitorViolation, 3 CapExceeded or MaxRounds.
/// Load errors use kExitLoadError.
int exit_code(Verdict::Kind k);
constexpr int kExitLoadError = 4;

// ---- traces ----

class TraceSink {
 public:
  virtual ~TraceSink() = default;
  /// One JSON line without the trailing newline.
  virtual void line(std::string_view text) = 0;
};

class FileSink : public TraceSink {
 public:
  explicit FileSink(const std::string& path);
  void line(std::string_view text) override;

 private:
  std::ofstream out_;
};

/// FNV-1a over the exact bytes a FileSink would write.
class HashSink : public TraceSink {
 public:
  void line(std::string_view text) override;
  std::uint64_t hash() const { return h_; }
  std::uint64_t bytes() const { return bytes_; }
  std::string hex() const;

 private:
  std::uint64_t h_ = 0xcbf29ce484222325ULL;
  std::uint64_t bytes_ = 0;
};

class MemorySink : public TraceSink {
 public:
  void line(std::string_view text) override { lines.emplace_back(text); }
  std::vector<std::string> lines;
};

/// Sends every line to several sinks.
class TeeSink : public TraceSink {
 public:
  explicit TeeSink(std::vector<TraceSink*> sinks) : sinks_(std::move(sinks)) {}
  void line(std::string_view text) override {
    for (auto* s : sinks_) s->line(text);
  }

 private:
  std::vector<TraceSink*> sinks_;
};

nlohmann::json claim_to_json(const Claim& c);
Claim claim_from_json(const nlohmann::json& j);
nlohmann::json round_to_json(const Round& r);   // number when it fits, decimal string otherwise
Round round_from_json(const nlohmann::json& j);
nlohmann::json graph_to_json(const PortGraph& g);
PortGraph graph_from_json(const nlohmann::json& j);  // validates

std::string format_header(const Scenario& sc);
std::string format_round(const RoundRecord& rec);
std::string format_span(const Round& from, const Round& to);
std::string format_verdict(const Verdict& v);

/// A trace read back from JSONL.
struct ParsedTrace {
  nlohmann::json header;
  struct Entry {
    RoundRecord record;
    std::optional<Round> span_to;  // record repeats through this round
  };
  std::vector<Entry> entries;
  std::optional<Verdict> verdict;
};
ParsedTrace parse_trace(std::istream& in);

// ---- running ----

struct RunOptions {
  bool fast_forward = true;
  bool monitors = true;
  TraceSink* sink = nullptr;
};

struct RunStats {
  std::uint64_t stepped_rounds = 0;  // rounds simulated one by one
  std::uint64_t spans = 0;
  std::uint64_t clamped_moves = 0;
};

struct RunResult {
  Verdict verdict;
  RunStats stats;
  std::vector<std::optional<Round>> wake_rounds;  // per agent, good only
};

RunResult run(const Scenario& sc, const RunOptions& opts = {});

}  // namespace byzg
