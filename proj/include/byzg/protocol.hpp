#pragma once

// Good-agent state machines for the known-size and unknown-size algorithms.

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "byzg/claim.hpp"
#include "byzg/config_space.hpp"
#include "byzg/exploration.hpp"

namespace byzg {

/// 10 T(EXPLO(n)) + 9n.
Round q_duration(int n);
/// 16 T(EXPLO(n_i)) + 9 n_i + 2 (n_i + 1) T(EST(n_i)) + 7Q.
Round z_duration(int n_i, const Round& q);

/// Waiting periods of one phase, all agents agree on them.
struct PhaseWaits {
  Round builder;      // yellow and orange
  Round red;
  Round wait_tower;
  Round phase;        // Q(n) or Z(n_i)
};
PhaseWaits known_waits(int n);
PhaseWaits unknown_waits(int n_i, const Round& q);

/// Ground truth exposed to monitors and traces; never read by protocol logic
/// of other agents.
struct Truth {
  Tag tag = Tag::kPart1;
  Color color = Color::kNone;
  std::uint64_t phase = 0;
  int n_i = 0;
};

class GoodAgent {
 public:
  virtual ~GoodAgent() = default;

  Label label() const { return label_; }
  bool declared() const { return declared_; }

  /// Round start: completes last round's move, if any, through `entry`.
  /// step() calls it itself when the caller has not.
  virtual void arrive(std::optional<Port> entry) = 0;
  /// The claim shouted this round; a pure function of the current state.
  virtual Claim claim() const = 0;
  /// Acts for this round and moves to next round's state.
  virtual Action step(const Observation& obs) = 0;
  /// Rounds, starting with the current one, the agent will spend staying
  /// with an unchanged claim and no transition if `obs` stays as it is.
  virtual Round idle_horizon(const Observation& obs) const = 0;
  /// Consumes `h` idle rounds (h <= idle_horizon).
  virtual void advance_idle(const Round& h) = 0;
  virtual Truth truth() const = 0;
  /// State while acting in the last stepped round: tag and color as claimed,
  /// phase and n_i of the phase that round belongs to.
  virtual Truth round_truth() const = 0;

 protected:
  explicit GoodAgent(Label label) : label_(label) {}
  Label label_;
  bool declared_ = false;
};

struct ProtocolError : std::logic_error {
  using std::logic_error::logic_error;
};

/// Raised when an agent would start a phase beyond the enumeration cap.
struct CapReached : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// idle_horizon value for agents that will never act again.
inline const Round kForever = -1;

/// Shared skeleton: tower builder, tower, wait-for-a-tower and failure are
/// common to both algorithms; subclasses supply setup, red exit and waits.
class PhaseAgent : public GoodAgent {
 public:
  void arrive(std::optional<Port> entry) override;
  Claim claim() const override;
  Action step(const Observation& obs) override;
  Round idle_horizon(const Observation& obs) const override;
  void advance_idle(const Round& h) override;
  Truth truth() const override;
  Truth round_truth() const override { return round_truth_; }

  std::uint64_t phase() const { return phase_; }
  Tag tag() const { return tag_; }
  Color color() const { return color_; }
  const Configuration* hypothesis() const { return cfg_; }
  const Round& age() const { return age_; }
  const Round& phase_start() const { return phase_start_; }

 protected:
  PhaseAgent(Label label, int f, EnumMode mode, std::uint64_t first_phase_cap);

  // Hooks.
  virtual void begin_phase() = 0;               // sets cfg_, n_i_, waits_
  virtual Action setup_step(const Observation& obs) = 0;
  virtual void red_done(const std::vector<Claim>& all) = 0;
  virtual Action extra_step(const Observation&, const std::vector<Claim>&) {
    throw ProtocolError("state not handled");
  }
  virtual Round extra_horizon(const Observation&, const std::vector<Claim>&) const { return 0; }
  virtual std::optional<std::uint64_t> red_phase_filter() const { return std::nullopt; }
  virtual void on_landed(const Move&) {}

  void start_phase(std::uint64_t i);
  void transit(Tag tag, Color color = Color::kNone);
  void enter_tower(long index, Port port);
  void enter_failure();
  Round phase_round() const { return age_ - phase_start_; }
  std::vector<Claim> with_self(const Observation& obs) const;
  Action move(Port p);
  // Follows the hypothesis path toward the smallest label (both algorithms).
  Action path_step(const Observation& obs);

  int f_;
  EnumMode mode_;
  std::uint64_t cap_;

  Tag tag_ = Tag::kPart1;
  Color color_ = Color::kNone;
  std::uint64_t phase_ = 0;
  const Configuration* cfg_ = nullptr;
  int n_i_ = 0;
  int k_ = 0;
  PhaseWaits waits_;
  const Uxs* uxs_ = nullptr;   // EXPLO(n_i) used by towers

  Round age_ = 0;              // rounds since waking, current round excluded
  Round phase_start_ = 0;      // age at which the current phase began
  Round elapsed_ = 0;          // rounds spent in the current (sub)state
  bool transited_ = false;
  bool arrived_ = false;
  Truth round_truth_;

  MoveLog phase_log_;
  std::optional<Port> pending_exit_;
  std::optional<Move> landed_;  // move completed at the start of this round
  bool next_phase_ = false;

  // setup path
  std::optional<MoveLog> path_;
  std::size_t path_pos_ = 0;
  bool path_started_ = false;

  // tower
  long index_ = 0;
  ExploWalk tower_walk_;

  // failure
  std::vector<Port> back_plan_;
  std::size_t back_pos_ = 0;

 private:
  Action builder_step(const std::vector<Claim>& all);
  Action tower_step(const Observation& obs, const std::vector<Claim>& all);
  Action wait_tower_step(const Observation& obs, const std::vector<Claim>& all);
  Action failure_step();
  Action dispatch(const Observation& obs);
};

/// Labels of red claims of `phase`, deduplicated and ascending.
std::vector<Label> red_label_set(const std::vector<Claim>& all, std::uint64_t phase);

/// Q_i: rounds an unknown-size agent spends before its phase i begins.
Round unknown_q(int f, std::uint64_t i);

/// Byz-Known-Size with the true size n.
class KnownAgent : public PhaseAgent {
 public:
  KnownAgent(Label label, int n, int f, std::uint64_t cap);

 protected:
  void begin_phase() override;
  Action setup_step(const Observation& obs) override;
  void red_done(const std::vector<Claim>& all) override;
  Action extra_step(const Observation& obs, const std::vector<Claim>& all) override;

 private:
  int n_;
  ExploWalk part1_walk_;
  std::vector<Port> part1_back_;
  std::size_t part1_pos_ = 0;
  bool part1_backtracking_ = false;
};

/// Byz-Unknown-Size.
class UnknownAgent : public PhaseAgent {
 public:
  UnknownAgent(Label label, int f, std::uint64_t cap);

  const std::vector<Label>& H() const { return H_; }
  /// Q: rounds spent before the current phase.
  const Round& q_before() const { return phase_start_; }

 protected:
  void begin_phase() override;
  Action setup_step(const Observation& obs) override;
  void red_done(const std::vector<Claim>& all) override;
  Action extra_step(const Observation& obs, const std::vector<Claim>& all) override;
  Round extra_horizon(const Observation& obs, const std::vector<Claim>& all) const override;
  std::optional<std::uint64_t> red_phase_filter() const override { return phase_; }

 private:
  Action explorer_step(const Observation& obs, const std::vector<Claim>& all);
  Action token_step(const std::vector<Claim>& all);
  int tokens_here(const std::vector<Claim>& all) const;
  int rank_in_H() const;

  long t_est_ = 0;
  // setup: EXPLO(n_i) then backtrack, then the path
  int setup_stage_ = 0;  // 0 explo, 1 backtrack, 2 path
  ExploWalk setup_walk_;
  std::vector<Port> setup_back_;
  std::size_t setup_pos_ = 0;

  std::vector<Label> H_;
  int token_case_ = 1;
  Round token_wait_;
  EstRun est_;
  bool est_running_ = false;
  std::vector<Port> est_back_;
  std::size_t est_back_pos_ = 0;
};

}  // namespace byzg
