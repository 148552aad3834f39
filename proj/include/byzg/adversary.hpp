#pragma once

// Byzantine strategies. Every strategy sees the whole engine state.

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "byzg/claim.hpp"
#include "byzg/protocol.hpp"
#include "byzg/rng.hpp"

namespace byzg {

struct AgentSnapshot {
  int id = 0;
  Label label = 0;
  bool good = true;
  bool dormant = false;
  bool declared = false;
  NodeId node = 0;
  std::optional<Claim> claim;  // good agents: this round's claim
  std::optional<Truth> truth;  // good agents only
  std::optional<Port> next_exit;  // good towers: the port they leave by this round
};

struct OmniscientView {
  const PortGraph* graph = nullptr;
  Round round = 0;
  int f = 0;
  bool known = true;
  long explo_length = 0;  // P(n) for the true size
  std::vector<AgentSnapshot> agents;
};

struct ScriptLine {
  long round = 0;
  std::optional<Port> move;
  std::optional<Claim> claim;
};

struct StrategySpec {
  std::string name = "sleeper";
  std::optional<Label> target;        // label_thief
  std::vector<ScriptLine> script;     // scripted
  std::string script_path;            // scripted, for the record
};

struct ByzDecision {
  Action action;
  Claim claim;
};

class Strategy {
 public:
  virtual ~Strategy() = default;
  virtual ByzDecision act(const OmniscientView& view, int self) = 0;
  /// Called after act() for the same round: rounds, this one included, over
  /// which act() would keep returning the same stay and claim while nothing
  /// else changes. kForever for no limit.
  virtual Round horizon(const OmniscientView&, int) const { return 0; }
  /// The engine skipped `h` rounds after the current one.
  virtual void advance_idle(const Round&) {}
};

/// Names accepted by make_strategy.
std::vector<std::string> registry();
bool is_registered(const std::string& name);

/// Throws std::invalid_argument for an unknown name or bad parameters.
std::unique_ptr<Strategy> make_strategy(const StrategySpec& spec, Label own_label, std::uint64_t seed);

/// Reads a scripted-strategy JSONL file.
std::vector<ScriptLine> load_script(const std::string& path);

}  // namespace byzg
