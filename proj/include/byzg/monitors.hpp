#pragma once

// Runtime checks over round records. The same objects run inside the engine
// and over traces read back from disk.

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "byzg/claim.hpp"
#include "byzg/protocol.hpp"

namespace byzg {

struct Scenario;
struct RoundRecord;
struct ParsedTrace;

struct MonitorContext {
  bool known = true;
  int n = 0;
  int f = 0;
  std::vector<bool> good;  // per agent id
};

MonitorContext monitor_context(const Scenario& sc);
MonitorContext monitor_context(const nlohmann::json& header);

/// Largest allowed spread between good agents' wake rounds.
Round wake_bound(bool known, int n, int f);

struct MonitorViolation {
  std::string monitor;
  Round round = 0;
  std::string detail;
};

enum class MonitorKind { kSimultaneity, kSingleTower, kPhaseTiming, kWakeDelay, kSizeLearning };
const char* to_string(MonitorKind k);
const std::vector<MonitorKind>& all_monitors();

class Monitors {
 public:
  explicit Monitors(MonitorContext ctx, std::vector<MonitorKind> enabled = all_monitors());

  /// Feeds one record; a span repeating it needs no call. Returns the first
  /// violation this record causes.
  std::optional<MonitorViolation> on_round(const RoundRecord& rec);

  /// Completed phases checked so far (phase-timing), for reporting.
  std::uint64_t phases_checked() const { return phases_checked_; }

 private:
  std::optional<MonitorViolation> simultaneity(const RoundRecord& rec);
  std::optional<MonitorViolation> single_tower(const RoundRecord& rec);
  std::optional<MonitorViolation> phase_timing(const RoundRecord& rec);
  std::optional<MonitorViolation> wake_delay(const RoundRecord& rec);
  std::optional<MonitorViolation> size_learning(const RoundRecord& rec);
  bool on(MonitorKind k) const;

  struct PerAgent {
    std::optional<Round> woke;
    bool declared = false;
    std::uint64_t phase = 0;
    Round phase_start = 0;
    int n_i = 0;
    std::optional<Tag> last_tag;
  };

  MonitorContext ctx_;
  std::vector<MonitorKind> enabled_;
  std::vector<PerAgent> agents_;
  std::optional<Round> first_wake_;
  Round wake_bound_ = 0;
  std::uint64_t phases_checked_ = 0;
};

/// Runs the chosen monitors over a full trace; first violation per monitor.
std::vector<MonitorViolation> check_trace(const ParsedTrace& trace,
                                          const std::vector<MonitorKind>& enabled = all_monitors());

std::optional<MonitorViolation> monitor_simultaneity(const ParsedTrace& trace);
std::optional<MonitorViolation> monitor_single_tower(const ParsedTrace& trace);
std::optional<MonitorViolation> monitor_phase_timing(const ParsedTrace& trace);
std::optional<MonitorViolation> monitor_wake_delay(const ParsedTrace& trace);
std::optional<MonitorViolation> monitor_size_learning(const ParsedTrace& trace);

}  // namespace byzg
