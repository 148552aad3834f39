#include "byzg/adversary.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <stdexcept>

#include <json.hpp>

namespace byzg {

namespace {

const OmniscientView& check(const OmniscientView& v) {
  if (!v.graph) throw std::logic_error("view without a graph");
  return v;
}

// Good agents still in play: awake and not declared.
bool live_good(const AgentSnapshot& a) { return a.good && !a.dormant && !a.declared; }

// First port of a shortest path from `from` to `to`, smallest port on ties.
std::optional<Port> first_hop(const PortGraph& g, NodeId from, NodeId to) {
  if (from == to) return std::nullopt;
  const auto dist = bfs_distances(g, to);
  for (Port p = 0; p < g.degree(from); ++p) {
    const NodeId nb = g.traverse(from, p).node;
    if (dist[nb] >= 0 && dist[nb] + 1 == dist[from]) return p;
  }
  return std::nullopt;
}

// Nearest live good agent by graph distance, ties by id.
const AgentSnapshot* nearest_good(const OmniscientView& v, NodeId from) {
  const auto dist = bfs_distances(*v.graph, from);
  const AgentSnapshot* best = nullptr;
  for (const auto& a : v.agents) {
    if (!live_good(a)) continue;
    if (!best || dist[a.node] < dist[best->node]) best = &a;
  }
  return best;
}

// Lowest-id live good agent: every Byzantine agent picks the same one.
const AgentSnapshot* first_good(const OmniscientView& v) {
  for (const auto& a : v.agents) {
    if (live_good(a)) return &a;
  }
  return nullptr;
}

std::optional<std::uint64_t> phase_of(const AgentSnapshot* a) {
  if (!a || !a->truth || a->truth->phase == 0) return std::nullopt;
  return a->truth->phase;
}

Action chase(const OmniscientView& v, NodeId self, const AgentSnapshot* target) {
  if (!target) return Action::Stay();
  const auto hop = first_hop(*v.graph, self, target->node);
  return hop ? Action::MoveBy(*hop) : Action::Stay();
}

class Sleeper : public Strategy {
 public:
  explicit Sleeper(Label own) : own_(own) {}
  ByzDecision act(const OmniscientView&, int) override {
    Claim c;
    c.label = own_;
    c.tag = Tag::kSetup;
    return {Action::Stay(), c};
  }
  Round horizon(const OmniscientView&, int) const override { return kForever; }

 private:
  Label own_;
};

class RandomWalker : public Strategy {
 public:
  RandomWalker(Label own, std::uint64_t seed) : own_(own), rng_(seed) {}
  ByzDecision act(const OmniscientView& view, int self) override {
    const auto& me = check(view).agents.at(self);
    const int deg = view.graph->degree(me.node);
    ByzDecision d;
    d.action = rng_.chance(1, 4) ? Action::Stay() : Action::MoveBy(static_cast<Port>(rng_.below(deg)));
    std::vector<Label> labels{own_};
    std::vector<std::uint64_t> phases;
    for (const auto& a : view.agents) {
      labels.push_back(a.label);
      if (auto p = phase_of(&a)) phases.push_back(*p);
    }
    Claim& c = d.claim;
    c.label = labels[rng_.below(labels.size())];
    c.tag = static_cast<Tag>(1 + rng_.below(7));  // never part1
    if (c.tag == Tag::kTowerBuilder) c.color = static_cast<Color>(1 + rng_.below(3));
    if (c.tag == Tag::kTower) {
      c.index = static_cast<long>(rng_.below(static_cast<std::uint64_t>(view.explo_length) + 1));
      c.port = static_cast<Port>(rng_.below(deg));
    }
    if (!phases.empty()) c.phase = phases[rng_.below(phases.size())];
    return d;
  }

 private:
  Label own_;
  Rng rng_;
};

class LabelThief : public Strategy {
 public:
  LabelThief(Label own, std::optional<Label> target) : own_(own), target_(target) {}
  ByzDecision act(const OmniscientView& view, int self) override {
    const auto& me = check(view).agents.at(self);
    const AgentSnapshot* t = find(view);
    ByzDecision d;
    d.claim.label = t ? t->label : own_;
    if (t && t->claim) {
      d.claim = *t->claim;
      d.claim.declared = false;
    }
    d.action = t && !t->dormant ? chase(view, me.node, t) : Action::Stay();
    return d;
  }
  Round horizon(const OmniscientView& view, int self) const override {
    const AgentSnapshot* t = find(view);
    if (!t || t->dormant || t->node == view.agents.at(self).node) return kForever;
    return 0;
  }

 private:
  const AgentSnapshot* find(const OmniscientView& view) const {
    const AgentSnapshot* best = nullptr;
    for (const auto& a : view.agents) {
      if (!a.good) continue;
      if (target_ ? a.label == *target_ : (!best || a.label < best->label)) best = &a;
    }
    return best;
  }
  Label own_;
  std::optional<Label> target_;
};

class TowerForger : public Strategy {
 public:
  explicit TowerForger(Label own) : own_(own) {}
  ByzDecision act(const OmniscientView& view, int self) override {
    const auto& me = check(view).agents.at(self);
    ByzDecision d;
    d.claim.label = own_;
    d.claim.tag = Tag::kTower;
    d.claim.phase = phase_of(first_good(view));
    // Ride along with a real tower standing here, otherwise count up in lockstep.
    for (const auto& a : view.agents) {
      if (a.good && !a.dormant && a.node == me.node && a.claim && a.claim->tag == Tag::kTower) {
        d.claim.index = a.claim->index;
        d.claim.port = a.claim->port;
        return d;
      }
    }
    const long len = view.explo_length + 1;
    d.claim.index = static_cast<long>(view.round % len);
    d.claim.port = 0;
    d.action = chase(view, me.node, first_good(view));
    return d;
  }

 private:
  Label own_;
};

// Chases the nearest good agent and shouts a fixed-shaped forged claim there.
class Shadow : public Strategy {
 public:
  using Forge = Claim (*)(const AgentSnapshot* target, Label own, const OmniscientView& view);
  Shadow(Label own, Forge forge) : own_(own), forge_(forge) {}
  ByzDecision act(const OmniscientView& view, int self) override {
    const auto& me = check(view).agents.at(self);
    const AgentSnapshot* t = nearest_good(view, me.node);
    return {chase(view, me.node, t), forge_(t, own_, view)};
  }
  Round horizon(const OmniscientView& view, int self) const override {
    const auto& me = view.agents.at(self);
    const AgentSnapshot* t = nearest_good(view, me.node);
    return !t || t->node == me.node ? kForever : Round(0);
  }

 private:
  Label own_;
  Forge forge_;
};

Claim orange_claim(const AgentSnapshot* t, Label own, const OmniscientView&) {
  Claim c;
  c.label = own;
  c.tag = Tag::kTowerBuilder;
  c.color = Color::kOrange;
  c.phase = phase_of(t);
  return c;
}

Claim red_claim(const AgentSnapshot* t, Label, const OmniscientView& view) {
  Claim c;
  // the smallest label no good agent holds
  Label l = 1;
  for (bool clash = true; clash;) {
    clash = false;
    for (const auto& a : view.agents) {
      if (a.good && a.label == l) {
        ++l;
        clash = true;
      }
    }
  }
  c.label = l;
  c.tag = Tag::kTowerBuilder;
  c.color = Color::kRed;
  c.phase = phase_of(t);
  return c;
}

Claim token_claim(const AgentSnapshot* t, Label own, const OmniscientView&) {
  Claim c;
  c.label = own;
  c.tag = Tag::kToken;
  c.phase = phase_of(t);
  return c;
}

class Scripted : public Strategy {
 public:
  Scripted(Label own, std::vector<ScriptLine> lines) : lines_(std::move(lines)) {
    std::stable_sort(lines_.begin(), lines_.end(), [](const auto& a, const auto& b) { return a.round < b.round; });
    last_.label = own;
    last_.tag = Tag::kSetup;
  }
  ByzDecision act(const OmniscientView& view, int) override {
    ByzDecision d;
    moved_ = false;
    while (pos_ < lines_.size() && Round(lines_[pos_].round) < view.round) ++pos_;
    if (pos_ < lines_.size() && Round(lines_[pos_].round) == view.round) {
      const auto& l = lines_[pos_++];
      if (l.claim) last_ = *l.claim;
      if (l.move) d.action = Action::MoveBy(*l.move);
      moved_ = l.move.has_value();
    }
    d.claim = last_;
    return d;
  }
  Round horizon(const OmniscientView& view, int) const override {
    if (moved_) return 0;
    if (pos_ >= lines_.size()) return kForever;
    return Round(lines_[pos_].round) - view.round;
  }

 private:
  std::vector<ScriptLine> lines_;
  std::size_t pos_ = 0;
  bool moved_ = false;
  Claim last_;
};

const std::vector<std::string> kNames = {"sleeper",        "random_walker", "label_thief",   "tower_forger",
                                         "orange_flooder", "red_mimic",     "token_phantom", "scripted"};

}  // namespace

std::vector<std::string> registry() { return kNames; }

bool is_registered(const std::string& name) { return std::find(kNames.begin(), kNames.end(), name) != kNames.end(); }

std::unique_ptr<Strategy> make_strategy(const StrategySpec& spec, Label own, std::uint64_t seed) {
  const auto& n = spec.name;
  if (n == "sleeper") return std::make_unique<Sleeper>(own);
  if (n == "random_walker") return std::make_unique<RandomWalker>(own, seed);
  if (n == "label_thief") return std::make_unique<LabelThief>(own, spec.target);
  if (n == "tower_forger") return std::make_unique<TowerForger>(own);
  if (n == "orange_flooder") return std::make_unique<Shadow>(own, orange_claim);
  if (n == "red_mimic") return std::make_unique<Shadow>(own, red_claim);
  if (n == "token_phantom") return std::make_unique<Shadow>(own, token_claim);
  if (n == "scripted") return std::make_unique<Scripted>(own, spec.script);
  throw std::invalid_argument("unknown strategy: " + n);
}

std::vector<ScriptLine> load_script(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open script " + path);
  std::vector<ScriptLine> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      ScriptLine s;
      s.round = j.at("round").get<long>();
      if (j.contains("move") && !j["move"].is_null()) s.move = j["move"].get<Port>();
      if (j.contains("claim") && !j["claim"].is_null()) {
        const auto& jc = j["claim"];
        Claim c;
        c.label = jc.value("label", 1);
        if (jc.contains("tag")) {
          auto t = parse_tag(jc["tag"].get<std::string>());
          if (!t) throw std::invalid_argument("bad tag");
          c.tag = *t;
        }
        if (jc.contains("color")) {
          auto col = parse_color(jc["color"].get<std::string>());
          if (!col) throw std::invalid_argument("bad color");
          c.color = *col;
        }
        if (jc.contains("index")) c.index = jc["index"].get<long>();
        if (jc.contains("port")) c.port = jc["port"].get<Port>();
        if (jc.contains("phase")) c.phase = jc["phase"].get<std::uint64_t>();
        c.declared = jc.value("declared", false);
        s.claim = c;
      }
      if (s.round < 0) throw std::invalid_argument("negative round");
      out.push_back(s);
    } catch (const std::exception& e) {
      throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace byzg
