#include "byzg/protocol.hpp"

#include <algorithm>

namespace byzg {

Round q_duration(int n) { return Round(10) * t_explo(n) + 9 * n; }

Round z_duration(int n_i, const Round& q) {
  return Round(16) * t_explo(n_i) + 9 * n_i + Round(2) * (n_i + 1) * t_est(n_i) + 7 * q;
}

PhaseWaits known_waits(int n) {
  const Round t = t_explo(n);
  return {t + n, t + n, 5 * t + 4 * n, q_duration(n)};
}

PhaseWaits unknown_waits(int n_i, const Round& q) {
  const Round t = t_explo(n_i);
  const Round e = t_est(n_i);
  return {t + n_i + q, t + n_i + e + q, 7 * t + 4 * n_i + (2 * n_i + 1) * e + 4 * q, z_duration(n_i, q)};
}

std::vector<Label> red_label_set(const std::vector<Claim>& all, std::uint64_t phase) {
  std::vector<Label> h;
  for (const auto& c : all) {
    if (c.tag == Tag::kTowerBuilder && c.color == Color::kRed && c.phase == phase) h.push_back(c.label);
  }
  std::sort(h.begin(), h.end());
  h.erase(std::unique(h.begin(), h.end()), h.end());
  return h;
}

Round unknown_q(int f, std::uint64_t i) {
  Round q = 0;
  const auto& e = enumerator(EnumMode::Unknown(f));
  for (std::uint64_t j = 1; j < i; ++j) q += z_duration(e.at(j).size(), q);
  return q;
}

// ---- shared skeleton ----

PhaseAgent::PhaseAgent(Label label, int f, EnumMode mode, std::uint64_t cap)
    : GoodAgent(label), f_(f), mode_(mode), cap_(cap) {}

Claim PhaseAgent::claim() const {
  Claim c;
  c.label = label_;
  c.tag = tag_;
  if (tag_ == Tag::kTowerBuilder) c.color = color_;
  if (tag_ == Tag::kTower) {
    c.index = index_;
    c.port = tower_walk_.last_entry;
  }
  if (phase_ > 0) c.phase = phase_;
  c.declared = declared_;
  return c;
}

Truth PhaseAgent::truth() const { return {tag_, tag_ == Tag::kTowerBuilder ? color_ : Color::kNone, phase_, n_i_}; }

std::vector<Claim> PhaseAgent::with_self(const Observation& obs) const {
  std::vector<Claim> all = obs.others;
  all.push_back(claim());
  return all;
}

void PhaseAgent::transit(Tag tag, Color color) {
  tag_ = tag;
  color_ = color;
  transited_ = true;
}

Action PhaseAgent::move(Port p) {
  pending_exit_ = p;
  return Action::MoveBy(p);
}

void PhaseAgent::start_phase(std::uint64_t i) {
  if (i > cap_) throw CapReached("phase " + std::to_string(i) + " exceeds the enumeration cap");
  phase_ = i;
  phase_start_ = age_;
  tag_ = Tag::kSetup;
  color_ = Color::kNone;
  elapsed_ = 0;
  phase_log_.clear();
  path_.reset();
  path_pos_ = 0;
  path_started_ = false;
  back_plan_.clear();
  back_pos_ = 0;
  begin_phase();
}

void PhaseAgent::enter_tower(long index, Port port) {
  transit(Tag::kTower);
  index_ = index;
  tower_walk_ = ExploWalk{};
  tower_walk_.cursor = index;
  tower_walk_.last_entry = port;
}

void PhaseAgent::enter_failure() {
  transit(Tag::kFailure);
  back_plan_ = backtrack_plan(phase_log_);
  back_pos_ = 0;
}

void PhaseAgent::arrive(std::optional<Port> entry) {
  arrived_ = true;
  landed_.reset();
  if (!pending_exit_) return;
  if (!entry) throw ProtocolError("moved last round but no entry port observed");
  landed_ = Move{*pending_exit_, *entry};
  pending_exit_.reset();
  if (tag_ != Tag::kFailure && tag_ != Tag::kPart1) phase_log_.push_back(*landed_);
  if (tag_ == Tag::kTower) explo_record(tower_walk_, landed_->exit, landed_->entry);
  on_landed(*landed_);
}

Action PhaseAgent::step(const Observation& obs) {
  const Truth before = truth();
  round_truth_ = before;
  if (declared_) return Action::Stay();
  if (!arrived_) arrive(obs.entry);
  arrived_ = false;
  transited_ = false;
  const Action a = dispatch(obs);
  round_truth_.phase = phase_;
  round_truth_.n_i = n_i_;
  elapsed_ = transited_ ? Round(0) : Round(elapsed_ + 1);
  age_ += 1;
  if (next_phase_) {
    next_phase_ = false;
    start_phase(phase_ + 1);
  }
  return a;
}

Action PhaseAgent::dispatch(const Observation& obs) {
  switch (tag_) {
    case Tag::kSetup:
      return setup_step(obs);
    case Tag::kTowerBuilder:
      return builder_step(with_self(obs));
    case Tag::kTower:
      return tower_step(obs, with_self(obs));
    case Tag::kWaitForTower:
      return wait_tower_step(obs, with_self(obs));
    case Tag::kFailure:
      return failure_step();
    default:
      return extra_step(obs, with_self(obs));
  }
}

Action PhaseAgent::path_step(const Observation& obs) {
  if (!path_started_) {
    path_started_ = true;
    path_ = setup_path(*cfg_, label_);
    path_pos_ = 0;
    if (!path_) {
      transit(Tag::kWaitForTower);
      return Action::Stay();
    }
  } else if (landed_ && landed_->entry != (*path_)[path_pos_ - 1].entry) {
    transit(Tag::kWaitForTower);
    return Action::Stay();
  }
  if (path_pos_ == path_->size()) {
    transit(Tag::kTowerBuilder, Color::kYellow);
    return Action::Stay();
  }
  const Port p = (*path_)[path_pos_].exit;
  if (p >= obs.degree) {
    transit(Tag::kWaitForTower);
    return Action::Stay();
  }
  ++path_pos_;
  return move(p);
}

Action PhaseAgent::builder_step(const std::vector<Claim>& all) {
  const int yellow = count_color(all, Color::kYellow);
  const int orange = count_color(all, Color::kOrange);
  const bool last = elapsed_ + 1 >= (color_ == Color::kRed ? waits_.red : waits_.builder);
  switch (color_) {
    case Color::kYellow:
      if (orange >= k_) {
        transit(Tag::kTowerBuilder, Color::kRed);
      } else if (last) {
        if (yellow + orange < k_) {
          transit(Tag::kWaitForTower);
        } else {
          transit(Tag::kTowerBuilder, Color::kOrange);
        }
      }
      break;
    case Color::kOrange:
      if (yellow + orange < k_) {
        transit(Tag::kWaitForTower);
      } else if (orange >= k_) {
        transit(Tag::kTowerBuilder, Color::kRed);
      } else if (last) {
        transit(Tag::kWaitForTower);
      }
      break;
    case Color::kRed:
      if (count_color(all, Color::kRed, red_phase_filter()) < k_) {
        transit(Tag::kWaitForTower);
      } else if (last) {
        red_done(all);
      }
      break;
    case Color::kNone:
      throw ProtocolError("tower builder without a color");
  }
  return Action::Stay();
}

namespace {

int same_group(const std::vector<Claim>& all, long index, Port port) {
  return static_cast<int>(std::count_if(all.begin(), all.end(), [&](const Claim& c) {
    return c.tag == Tag::kTower && c.index == index && c.port.value_or(0) == port;
  }));
}

}  // namespace

Action PhaseAgent::tower_step(const Observation& obs, const std::vector<Claim>& all) {
  if (same_group(all, index_, tower_walk_.last_entry) < f_ + 1) {
    enter_failure();
    return Action::Stay();
  }
  if (index_ == uxs_->length()) {
    declared_ = true;
    return Action::Declare();
  }
  const Port p = explo_step(tower_walk_, *uxs_, obs.degree);
  ++index_;
  return move(p);
}

Action PhaseAgent::wait_tower_step(const Observation& obs, const std::vector<Claim>& all) {
  for (const auto& g : tower_groups(all)) {
    if (g.size < f_ + 1) continue;
    if (g.index < 0 || g.index > uxs_->length() || g.port < 0) continue;  // not an EXPLO(n_i) position
    if (g.index == uxs_->length()) {
      declared_ = true;
      return Action::Declare();
    }
    enter_tower(g.index, g.port);
    const Port p = explo_step(tower_walk_, *uxs_, obs.degree);
    ++index_;
    return move(p);
  }
  if (elapsed_ + 1 >= waits_.wait_tower) enter_failure();
  return Action::Stay();
}

Action PhaseAgent::failure_step() {
  if (back_pos_ < back_plan_.size()) return move(back_plan_[back_pos_++]);
  if (phase_round() + 1 >= waits_.phase) next_phase_ = true;
  return Action::Stay();
}

Round PhaseAgent::idle_horizon(const Observation& obs) const {
  if (declared_) return kForever;
  if (pending_exit_ || landed_) return 0;
  auto rest = [&](const Round& wait) -> Round {
    const Round r = wait - 1 - elapsed_;
    return r > 0 ? r : Round(0);
  };
  switch (tag_) {
    case Tag::kTowerBuilder: {
      const auto all = with_self(obs);
      const int yellow = count_color(all, Color::kYellow);
      const int orange = count_color(all, Color::kOrange);
      if (color_ == Color::kYellow) return orange >= k_ ? Round(0) : rest(waits_.builder);
      if (color_ == Color::kOrange) {
        return (yellow + orange < k_ || orange >= k_) ? Round(0) : rest(waits_.builder);
      }
      return count_color(all, Color::kRed, red_phase_filter()) < k_ ? Round(0) : rest(waits_.red);
    }
    case Tag::kWaitForTower:
      for (const auto& g : tower_groups(obs.others)) {
        if (g.size >= f_ + 1 && g.index >= 0 && g.index <= uxs_->length() && g.port >= 0) return 0;
      }
      return rest(waits_.wait_tower);
    case Tag::kFailure: {
      if (back_pos_ < back_plan_.size()) return 0;
      const Round r = waits_.phase - 1 - phase_round();
      return r > 0 ? r : Round(0);
    }
    case Tag::kSetup:
    case Tag::kTower:
    case Tag::kPart1:
      return 0;
    default:
      return extra_horizon(obs, with_self(obs));
  }
}

void PhaseAgent::advance_idle(const Round& h) {
  round_truth_ = truth();
  arrived_ = false;
  elapsed_ += h;
  age_ += h;
}

// ---- known size ----

KnownAgent::KnownAgent(Label label, int n, int f, std::uint64_t cap)
    : PhaseAgent(label, f, EnumMode::Known(n, f), cap), n_(n) {
  n_i_ = n;
  uxs_ = &uxs_for(n);
}

void KnownAgent::begin_phase() {
  cfg_ = &enumerator(mode_).at(phase_);
  n_i_ = n_;
  k_ = static_cast<int>(cfg_->placements.size());
  waits_ = known_waits(n_);
  uxs_ = &uxs_for(n_);
}

Action KnownAgent::setup_step(const Observation& obs) { return path_step(obs); }

void KnownAgent::red_done(const std::vector<Claim>&) { enter_tower(0, 0); }

// Part 1: EXPLO(n) from the wake node, then the reverse walk home.
Action KnownAgent::extra_step(const Observation& obs, const std::vector<Claim>&) {
  if (tag_ != Tag::kPart1) throw ProtocolError("known-size agent in a foreign state");
  if (landed_ && !part1_backtracking_) explo_record(part1_walk_, landed_->exit, landed_->entry);
  if (!part1_backtracking_) {
    if (part1_walk_.cursor < uxs_->length()) return move(explo_step(part1_walk_, *uxs_, obs.degree));
    part1_backtracking_ = true;
    part1_back_ = backtrack_plan(part1_walk_.log);
    part1_pos_ = 0;
  }
  if (part1_pos_ < part1_back_.size()) return move(part1_back_[part1_pos_++]);
  start_phase(1);
  return setup_step(obs);
}

// ---- unknown size ----

UnknownAgent::UnknownAgent(Label label, int f, std::uint64_t cap) : PhaseAgent(label, f, EnumMode::Unknown(f), cap) {
  start_phase(1);
}

void UnknownAgent::begin_phase() {
  cfg_ = &enumerator(mode_).at(phase_);
  n_i_ = cfg_->size();
  k_ = static_cast<int>(cfg_->placements.size());
  waits_ = unknown_waits(n_i_, phase_start_);
  uxs_ = &uxs_for(n_i_);
  t_est_ = t_est(n_i_);
  setup_stage_ = 0;
  setup_walk_ = ExploWalk{};
  setup_back_.clear();
  setup_pos_ = 0;
  H_.clear();
  est_running_ = false;
  est_back_.clear();
  est_back_pos_ = 0;
}

Action UnknownAgent::setup_step(const Observation& obs) {
  if (setup_stage_ == 0) {
    if (landed_) explo_record(setup_walk_, landed_->exit, landed_->entry);
    if (setup_walk_.cursor < uxs_->length()) return move(explo_step(setup_walk_, *uxs_, obs.degree));
    setup_stage_ = 1;
    setup_back_ = backtrack_plan(setup_walk_.log);
    setup_pos_ = 0;
  }
  if (setup_stage_ == 1) {
    if (setup_pos_ < setup_back_.size()) return move(setup_back_[setup_pos_++]);
    setup_stage_ = 2;
    landed_.reset();  // the path starts here; the backtrack landing is not part of it
  }
  return path_step(obs);
}

int UnknownAgent::rank_in_H() const {
  return static_cast<int>(std::lower_bound(H_.begin(), H_.end(), label_) - H_.begin());
}

void UnknownAgent::red_done(const std::vector<Claim>& all) {
  H_ = red_label_set(all, phase_);
  if (static_cast<int>(H_.size()) > n_i_) {
    enter_failure();
    return;
  }
  if (H_.front() == label_) {
    transit(Tag::kExplorer);
    est_ = est_init(n_i_, t_est_);
    est_running_ = true;
    est_back_.clear();
    est_back_pos_ = 0;
    return;
  }
  transit(Tag::kToken);
  token_case_ = 1;
  token_wait_ = Round(2) * rank_in_H() * t_est_;
}

int UnknownAgent::tokens_here(const std::vector<Claim>& all) const { return count_tag(all, Tag::kToken, phase_); }

Action UnknownAgent::extra_step(const Observation& obs, const std::vector<Claim>& all) {
  if (tag_ == Tag::kExplorer) return explorer_step(obs, all);
  if (tag_ == Tag::kToken) return token_step(all);
  throw ProtocolError("unknown-size agent in a foreign state");
}

Action UnknownAgent::explorer_step(const Observation& obs, const std::vector<Claim>& all) {
  const bool token = tokens_here(all) >= f_ + 1;
  Action a = Action::Stay();
  if (est_running_) {
    EstObservation eo{obs.degree, landed_ ? std::optional<Port>(landed_->entry) : std::nullopt, token};
    const EstAction ea = est_step(est_, eo);
    switch (ea.status) {
      case EstStatus::kMove:
        a = move(ea.port);
        break;
      case EstStatus::kFailed:
        enter_failure();
        return Action::Stay();
      case EstStatus::kFinished:
        est_running_ = false;
        est_back_ = backtrack_plan(est_.log);
        est_back_pos_ = 0;
        if (!est_back_.empty()) a = move(est_back_[est_back_pos_++]);
        break;
    }
  } else if (est_back_pos_ < est_back_.size()) {
    a = move(est_back_[est_back_pos_++]);
  }
  if (elapsed_ + 1 >= Round(2) * t_est_) {
    if (a.kind == Action::Kind::kMove || !token) {
      pending_exit_.reset();
      enter_failure();
      return Action::Stay();
    }
    if (label_ == H_.back()) {
      enter_tower(0, 0);
    } else {
      transit(Tag::kToken);
      token_case_ = 2;
      token_wait_ = Round(2) * (static_cast<long>(H_.size()) - rank_in_H() - 1) * t_est_;
    }
  }
  return a;
}

Action UnknownAgent::token_step(const std::vector<Claim>& all) {
  if (tokens_here(all) < f_ + 1) {
    enter_failure();
    return Action::Stay();
  }
  if (elapsed_ + 1 >= token_wait_) {
    if (token_case_ == 1) {
      transit(Tag::kExplorer);
      est_ = est_init(n_i_, t_est_);
      est_running_ = true;
      est_back_.clear();
      est_back_pos_ = 0;
    } else {
      enter_tower(0, 0);
    }
  }
  return Action::Stay();
}

Round UnknownAgent::extra_horizon(const Observation&, const std::vector<Claim>& all) const {
  auto rest = [&](const Round& wait) -> Round {
    const Round r = wait - 1 - elapsed_;
    return r > 0 ? r : Round(0);
  };
  if (tag_ == Tag::kToken) return tokens_here(all) < f_ + 1 ? Round(0) : rest(token_wait_);
  if (tag_ == Tag::kExplorer) {
    if (est_running_ || est_back_pos_ < est_back_.size()) return 0;
    return rest(Round(2) * t_est_);
  }
  return 0;
}

}  // namespace byzg
