#include "byzg/monitors.hpp"

#include <algorithm>
#include <map>

#include "byzg/engine.hpp"

namespace byzg {

MonitorContext monitor_context(const Scenario& sc) {
  MonitorContext c{sc.known, sc.n(), sc.f, {}};
  for (const auto& a : sc.agents) c.good.push_back(a.good);
  return c;
}

MonitorContext monitor_context(const nlohmann::json& header) {
  MonitorContext c;
  c.known = header.at("mode").get<std::string>() == "known";
  c.n = header.at("n").get<int>();
  c.f = header.at("f").get<int>();
  for (const auto& a : header.at("agents")) c.good.push_back(a.at("good").get<bool>());
  return c;
}

Round wake_bound(bool known, int n, int f) {
  if (known) return t_explo(n);
  // first phase whose hypothesis is at least as large as the real graph
  const auto& e = enumerator(EnumMode::Unknown(f));
  Round q = 0;
  for (std::uint64_t i = 1;; ++i) {
    const int n_i = e.at(i).size();
    if (n_i >= n) return q + t_explo(n_i);
    q += z_duration(n_i, q);
  }
}

const char* to_string(MonitorKind k) {
  switch (k) {
    case MonitorKind::kSimultaneity:
      return "simultaneity";
    case MonitorKind::kSingleTower:
      return "single_tower";
    case MonitorKind::kPhaseTiming:
      return "phase_timing";
    case MonitorKind::kWakeDelay:
      return "wake_delay";
    case MonitorKind::kSizeLearning:
      return "size_learning";
  }
  return "?";
}

const std::vector<MonitorKind>& all_monitors() {
  static const std::vector<MonitorKind> v = {MonitorKind::kSimultaneity, MonitorKind::kSingleTower,
                                             MonitorKind::kPhaseTiming, MonitorKind::kWakeDelay,
                                             MonitorKind::kSizeLearning};
  return v;
}

Monitors::Monitors(MonitorContext ctx, std::vector<MonitorKind> enabled)
    : ctx_(std::move(ctx)), enabled_(std::move(enabled)), agents_(ctx_.good.size()) {
  if (on(MonitorKind::kWakeDelay)) wake_bound_ = wake_bound(ctx_.known, ctx_.n, ctx_.f);
}

bool Monitors::on(MonitorKind k) const { return std::find(enabled_.begin(), enabled_.end(), k) != enabled_.end(); }

std::optional<MonitorViolation> Monitors::on_round(const RoundRecord& rec) {
  if (rec.agents.size() != agents_.size()) return MonitorViolation{"trace", rec.r, "agent count changed"};
  std::optional<MonitorViolation> v;
  if (!v && on(MonitorKind::kSimultaneity)) v = simultaneity(rec);
  if (!v && on(MonitorKind::kSingleTower)) v = single_tower(rec);
  if (!v && on(MonitorKind::kPhaseTiming)) v = phase_timing(rec);
  if (!v && on(MonitorKind::kWakeDelay)) v = wake_delay(rec);
  if (!v && on(MonitorKind::kSizeLearning)) v = size_learning(rec);
  // bookkeeping shared by several monitors
  for (std::size_t i = 0; i < rec.agents.size(); ++i) {
    const auto& a = rec.agents[i];
    auto& s = agents_[i];
    if (!ctx_.good[i] || a.dormant) continue;
    if (!s.woke) s.woke = rec.r;
    if (a.action.kind == Action::Kind::kDeclare) s.declared = true;
    if (a.truth) s.last_tag = a.truth->tag;
  }
  return v;
}

std::optional<MonitorViolation> Monitors::simultaneity(const RoundRecord& rec) {
  std::optional<NodeId> node;
  for (std::size_t i = 0; i < rec.agents.size(); ++i) {
    if (ctx_.good[i] && rec.agents[i].action.kind == Action::Kind::kDeclare && !rec.agents[i].dormant) {
      node = rec.agents[i].node;
      break;
    }
  }
  if (!node) return std::nullopt;
  for (std::size_t i = 0; i < rec.agents.size(); ++i) {
    if (!ctx_.good[i] || agents_[i].declared) continue;
    const auto& a = rec.agents[i];
    if (a.dormant || a.action.kind != Action::Kind::kDeclare || a.node != *node) {
      return MonitorViolation{"simultaneity", rec.r,
                              "agent " + std::to_string(i) + " does not declare with the others at node " +
                                  std::to_string(*node)};
    }
  }
  return std::nullopt;
}

std::optional<MonitorViolation> Monitors::single_tower(const RoundRecord& rec) {
  std::map<std::pair<NodeId, long>, int> groups;
  for (const auto& a : rec.agents) {
    if (a.dormant || !a.claim || a.claim->tag != Tag::kTower) continue;
    ++groups[{a.node, a.claim->index.value_or(0)}];
  }
  int towers = 0;
  std::string where;
  for (const auto& [key, size] : groups) {
    if (size >= ctx_.f + 1) {
      ++towers;
      where += " (node " + std::to_string(key.first) + ", index " + std::to_string(key.second) + ")";
    }
  }
  if (towers >= 2) return MonitorViolation{"single_tower", rec.r, std::to_string(towers) + " towers:" + where};
  return std::nullopt;
}

std::optional<MonitorViolation> Monitors::phase_timing(const RoundRecord& rec) {
  for (std::size_t i = 0; i < rec.agents.size(); ++i) {
    const auto& a = rec.agents[i];
    if (!ctx_.good[i] || a.dormant || !a.truth) continue;
    auto& s = agents_[i];
    const std::uint64_t p = a.truth->phase;
    if (p == s.phase) {
      s.n_i = a.truth->n_i;
      continue;
    }
    if (p != s.phase + 1) {
      return MonitorViolation{"phase_timing", rec.r,
                              "agent " + std::to_string(i) + " jumps from phase " + std::to_string(s.phase) + " to " +
                                  std::to_string(p)};
    }
    if (s.phase > 0) {
      const Round len = rec.r - s.phase_start;
      const Round woke = s.woke.value_or(rec.r);
      const Round want = ctx_.known ? q_duration(ctx_.n) : z_duration(s.n_i, s.phase_start - woke);
      ++phases_checked_;
      if (len != want) {
        return MonitorViolation{"phase_timing", rec.r,
                                "agent " + std::to_string(i) + " phase " + std::to_string(s.phase) + " lasted " +
                                    len.str() + " rounds, expected " + want.str()};
      }
    }
    s.phase = p;
    s.phase_start = rec.r;
    s.n_i = a.truth->n_i;
  }
  return std::nullopt;
}

std::optional<MonitorViolation> Monitors::wake_delay(const RoundRecord& rec) {
  for (std::size_t i = 0; i < rec.agents.size(); ++i) {
    if (!ctx_.good[i] || rec.agents[i].dormant || agents_[i].woke) continue;
    if (!first_wake_) first_wake_ = rec.r;
    if (rec.r - *first_wake_ > wake_bound_) {
      return MonitorViolation{"wake_delay", rec.r,
                              "agent " + std::to_string(i) + " woke " + Round(rec.r - *first_wake_).str() +
                                  " rounds after the first, bound " + wake_bound_.str()};
    }
  }
  return std::nullopt;
}

std::optional<MonitorViolation> Monitors::size_learning(const RoundRecord& rec) {
  if (ctx_.known) return std::nullopt;
  for (std::size_t i = 0; i < rec.agents.size(); ++i) {
    const auto& a = rec.agents[i];
    const auto& s = agents_[i];
    if (!ctx_.good[i] || a.dormant || !a.truth || !s.last_tag) continue;
    const bool from = *s.last_tag == Tag::kToken || *s.last_tag == Tag::kExplorer;
    if (from && a.truth->tag == Tag::kTower && a.truth->n_i != ctx_.n) {
      return MonitorViolation{"size_learning", rec.r,
                              "agent " + std::to_string(i) + " entered tower from " + to_string(*s.last_tag) +
                                  " with n_i=" + std::to_string(a.truth->n_i) + ", n=" + std::to_string(ctx_.n)};
    }
  }
  return std::nullopt;
}

std::vector<MonitorViolation> check_trace(const ParsedTrace& trace, const std::vector<MonitorKind>& enabled) {
  std::vector<MonitorViolation> out;
  const auto ctx = monitor_context(trace.header);
  for (auto k : enabled) {
    Monitors m(ctx, {k});
    for (const auto& e : trace.entries) {
      if (auto v = m.on_round(e.record)) {
        out.push_back(*v);
        break;
      }
    }
  }
  return out;
}

namespace {

std::optional<MonitorViolation> only(const ParsedTrace& t, MonitorKind k) {
  auto v = check_trace(t, {k});
  if (v.empty()) return std::nullopt;
  return v.front();
}

}  // namespace

std::optional<MonitorViolation> monitor_simultaneity(const ParsedTrace& t) { return only(t, MonitorKind::kSimultaneity); }
std::optional<MonitorViolation> monitor_single_tower(const ParsedTrace& t) { return only(t, MonitorKind::kSingleTower); }
std::optional<MonitorViolation> monitor_phase_timing(const ParsedTrace& t) { return only(t, MonitorKind::kPhaseTiming); }
std::optional<MonitorViolation> monitor_wake_delay(const ParsedTrace& t) { return only(t, MonitorKind::kWakeDelay); }
std::optional<MonitorViolation> monitor_size_learning(const ParsedTrace& t) { return only(t, MonitorKind::kSizeLearning); }

}  // namespace byzg
