#pragma once

// Corpus expansion, bounds, batch execution and summaries.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "byzg/engine.hpp"

namespace byzg {

struct CorpusSkip {
  std::optional<int> n;
  std::optional<int> f;
  std::vector<std::string> strategies;  // empty matches all
  std::string reason;
};

struct CorpusSpec {
  std::string name = "corpus";
  bool known = true;
  std::vector<GraphKind> graphs;
  std::vector<int> sizes;
  std::vector<int> fs;
  std::vector<std::string> strategies;
  std::vector<std::string> schedules;  // simultaneous, staggered, contact_only
  std::uint64_t seed = 1;
  std::uint64_t cap = 100000;
  std::vector<CorpusSkip> skips;
  std::string note;
};

CorpusSpec corpus_from_json(const nlohmann::json& j);
CorpusSpec load_corpus(const std::string& path);

struct CorpusEntry {
  Scenario scenario;
  std::string graph;
  std::string strategy;  // "none" when no Byzantine agent fits
  std::string schedule;
};

struct SkippedEntry {
  std::string id;
  std::string reason;
};

struct Expansion {
  std::vector<CorpusEntry> entries;
  std::vector<SkippedEntry> skipped;
};

/// Good agents get labels 1..k on nodes 0..k-1, Byzantine agents the next
/// labels on the following nodes. Ordered and named deterministically.
Expansion expand(const CorpusSpec& spec);

/// Position of the good agents' true configuration in the agreed enumeration.
std::uint64_t true_index(const Scenario& sc);

/// Round by which every good agent must have declared, given the actual
/// wake rounds (good agents only; others ignored).
Round liveness_bound(const Scenario& sc, const std::vector<std::optional<Round>>& wake_rounds);
/// The same bound before the run: contact-woken agents assumed as late as
/// the wake-delay bound allows.
Round liveness_bound_upfront(const Scenario& sc);

/// Byzantine-free, simultaneous-wake prediction: in phase i* the good agents
/// build their tower at the start node of the smallest label, unless an
/// earlier phase already declared.
struct IdealPrediction {
  std::uint64_t i_star = 0;
  NodeId target = 0;
};
IdealPrediction oracle_ideal(const Scenario& sc);  // throws std::invalid_argument if sc has f > 0

enum class IdealOutcome { kConfirmed, kEarlierDeclaration, kViolated };
const char* to_string(IdealOutcome o);
IdealOutcome check_ideal(const ParsedTrace& trace, const IdealPrediction& p, std::string* detail = nullptr);

struct ScenarioResult {
  std::string id;
  std::string mode;
  std::string graph;
  int n = 0;
  int f = 0;
  int k_good = 0;
  std::string strategy;
  std::string schedule;
  Verdict verdict;
  std::optional<Round> declare_round;
  Round bound = 0;
  std::optional<Round> margin;  // bound - declare_round
  std::uint64_t i_star = 0;
  std::string trace_hash;
  std::uint64_t trace_bytes = 0;
  std::uint64_t stepped_rounds = 0;
  double seconds = 0;
  std::string error;  // load errors
};

struct BatchOptions {
  bool parallel = true;
  bool fast_forward = true;
  std::string trace_dir;  // empty: traces are hashed only
};

ScenarioResult run_entry(const CorpusEntry& e, const BatchOptions& opts);
/// Results are ordered like the entries whatever the schedule.
std::vector<ScenarioResult> run_batch(const std::vector<CorpusEntry>& entries, const BatchOptions& opts);

void write_summary_csv(const std::vector<ScenarioResult>& results, const std::string& path);
nlohmann::json summary_json(const std::vector<ScenarioResult>& results, const std::vector<SkippedEntry>& skipped);

/// BYZG_OUT, or "out" when unset.
std::string output_dir();

/// Scenario file: graph as {"n","adj"} or {"kind","n","extra_edges","seed"},
/// agents with 0-based start nodes. Relative script paths resolve against
/// `base_dir`. Throws std::invalid_argument (ScenarioError for model rules).
Scenario scenario_from_json(const nlohmann::json& j, const std::string& base_dir = ".");
Scenario load_scenario(const std::string& path);
nlohmann::json scenario_to_json(const Scenario& sc);

/// Maps a schedule name onto wake rounds; throws std::invalid_argument.
void apply_schedule(Scenario& sc, const std::string& schedule);

}  // namespace byzg
