#include "byzg/engine.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <set>
#include <sstream>

#include "byzg/monitors.hpp"

namespace byzg {

int Scenario::good_count() const {
  return static_cast<int>(std::count_if(agents.begin(), agents.end(), [](const AgentSpec& a) { return a.good; }));
}

void validate(const Scenario& sc) {
  const auto rep = byzg::validate(sc.graph);
  if (!rep.ok()) throw ScenarioError(sc.id + ": invalid graph: " + rep.issues.front().message);
  if (sc.f < 0) throw ScenarioError(sc.id + ": f must be non-negative");
  std::set<Label> labels;
  std::set<NodeId> starts;
  int byz = 0;
  bool woken = false;
  for (const auto& a : sc.agents) {
    if (a.label < 1) throw ScenarioError(sc.id + ": labels must be positive");
    if (!labels.insert(a.label).second) throw ScenarioError(sc.id + ": duplicate label " + std::to_string(a.label));
    if (a.start < 0 || a.start >= sc.n()) throw ScenarioError(sc.id + ": start node out of range");
    if (!starts.insert(a.start).second) throw ScenarioError(sc.id + ": two agents share a start node");
    if (a.good) {
      if (a.wake && *a.wake < 0) throw ScenarioError(sc.id + ": negative wake round");
      woken = woken || a.wake.has_value();
    } else {
      ++byz;
      if (!is_registered(a.strategy.name)) throw ScenarioError(sc.id + ": unknown strategy " + a.strategy.name);
    }
  }
  if (byz > sc.f) throw ScenarioError(sc.id + ": more Byzantine agents than f");
  if (!woken) throw ScenarioError(sc.id + ": no good agent is woken by the adversary");
}

const char* to_string(Verdict::Kind k) {
  switch (k) {
    case Verdict::Kind::kAllDeclared:
      return "AllDeclared";
    case Verdict::Kind::kCapExceeded:
      return "CapExceeded";
    case Verdict::Kind::kMaxRounds:
      return "MaxRounds";
    case Verdict::Kind::kMonitorViolation:
      return "MonitorViolation";
  }
  return "?";
}

std::optional<Verdict::Kind> parse_verdict_kind(const std::string& s) {
  for (auto k : {Verdict::Kind::kAllDeclared, Verdict::Kind::kCapExceeded, Verdict::Kind::kMaxRounds,
                 Verdict::Kind::kMonitorViolation}) {
    if (s == to_string(k)) return k;
  }
  return std::nullopt;
}

int exit_code(Verdict::Kind k) {
  switch (k) {
    case Verdict::Kind::kAllDeclared:
      return 0;
    case Verdict::Kind::kMonitorViolation:
      return 2;
    case Verdict::Kind::kCapExceeded:
    case Verdict::Kind::kMaxRounds:
      return 3;
  }
  return 4;
}

// ---- sinks ----

FileSink::FileSink(const std::string& path) : out_(path, std::ios::binary) {
  if (!out_) throw std::runtime_error("cannot write " + path);
}

void FileSink::line(std::string_view text) {
  out_.write(text.data(), static_cast<std::streamsize>(text.size()));
  out_.put('\n');
}

void HashSink::line(std::string_view text) {
  for (unsigned char c : text) {
    h_ ^= c;
    h_ *= 0x100000001b3ULL;
  }
  h_ ^= static_cast<unsigned char>('\n');
  h_ *= 0x100000001b3ULL;
  bytes_ += text.size() + 1;
}

std::string HashSink::hex() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h_));
  return buf;
}

// ---- JSON ----

namespace {

const Round kInt63 = Round(1) << 63;

void put_int(std::string& s, long long v) {
  char buf[24];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  s.append(buf, res.ptr);
}

void put_round(std::string& s, const Round& r) {
  if (r >= 0 && r < kInt63) {
    put_int(s, r.convert_to<long long>());
  } else {
    s += '"';
    s += r.str();
    s += '"';
  }
}

void put_claim(std::string& s, const Claim& c) {
  s += "{\"label\":";
  put_int(s, c.label);
  s += ",\"tag\":\"";
  s += to_string(c.tag);
  s += '"';
  if (c.color != Color::kNone) {
    s += ",\"color\":\"";
    s += to_string(c.color);
    s += '"';
  }
  if (c.index) {
    s += ",\"index\":";
    put_int(s, *c.index);
  }
  if (c.port) {
    s += ",\"port\":";
    put_int(s, *c.port);
  }
  if (c.phase) {
    s += ",\"phase\":";
    // phases fit in 63 bits in practice; keep the exact value either way
    put_round(s, Round(*c.phase));
  }
  if (c.declared) s += ",\"declared\":true";
  s += '}';
}

}  // namespace

nlohmann::json claim_to_json(const Claim& c) {
  std::string s;
  put_claim(s, c);
  return nlohmann::json::parse(s);
}

Claim claim_from_json(const nlohmann::json& j) {
  Claim c;
  c.label = j.at("label").get<Label>();
  const auto tag = parse_tag(j.at("tag").get<std::string>());
  if (!tag) throw std::invalid_argument("bad claim tag");
  c.tag = *tag;
  if (j.contains("color")) {
    const auto col = parse_color(j["color"].get<std::string>());
    if (!col) throw std::invalid_argument("bad claim color");
    c.color = *col;
  }
  if (j.contains("index")) c.index = j["index"].get<long>();
  if (j.contains("port")) c.port = j["port"].get<Port>();
  if (j.contains("phase")) c.phase = round_from_json(j["phase"]).convert_to<std::uint64_t>();
  c.declared = j.value("declared", false);
  return c;
}

nlohmann::json round_to_json(const Round& r) {
  if (r >= 0 && r < kInt63) return r.convert_to<long long>();
  return r.str();
}

Round round_from_json(const nlohmann::json& j) {
  if (j.is_string()) return Round(j.get<std::string>());
  if (j.is_number_unsigned()) return Round(j.get<std::uint64_t>());
  if (j.is_number_integer()) return Round(j.get<long long>());
  throw std::invalid_argument("round must be an integer or a decimal string");
}

nlohmann::json graph_to_json(const PortGraph& g) {
  nlohmann::json adj = nlohmann::json::array();
  for (const auto& row : g.adjacency()) {
    nlohmann::json r = nlohmann::json::array();
    for (const auto& e : row) r.push_back({e.neighbor, e.back_port});
    adj.push_back(r);
  }
  return {{"n", g.size()}, {"adj", adj}};
}

PortGraph graph_from_json(const nlohmann::json& j) {
  std::vector<std::vector<PortEntry>> adj;
  for (const auto& row : j.at("adj")) {
    std::vector<PortEntry> r;
    for (const auto& e : row) r.push_back({e.at(0).get<NodeId>(), e.at(1).get<Port>()});
    adj.push_back(std::move(r));
  }
  if (j.contains("n") && j["n"].get<int>() != static_cast<int>(adj.size())) {
    throw std::invalid_argument("graph: n does not match adj");
  }
  PortGraph g(std::move(adj));
  const auto rep = validate(g);
  if (!rep.ok()) throw std::invalid_argument("graph: " + rep.issues.front().message);
  return g;
}

std::string format_header(const Scenario& sc) {
  nlohmann::json agents = nlohmann::json::array();
  for (std::size_t i = 0; i < sc.agents.size(); ++i) {
    const auto& a = sc.agents[i];
    nlohmann::json ja = {{"id", i}, {"label", a.label}, {"good", a.good}, {"start", a.start}};
    if (a.good) {
      ja["wake"] = a.wake ? round_to_json(*a.wake) : nlohmann::json(nullptr);
    } else {
      ja["strategy"] = a.strategy.name;
      if (a.strategy.target) ja["target"] = *a.strategy.target;
    }
    agents.push_back(ja);
  }
  nlohmann::json h = {{"type", "header"},
                      {"scenario", sc.id},
                      {"mode", sc.known ? "known" : "unknown"},
                      {"n", sc.n()},
                      {"f", sc.f},
                      {"seed", sc.seed},
                      {"cap", sc.cap},
                      {"graph", graph_to_json(sc.graph)},
                      {"agents", agents}};
  if (sc.max_rounds) h["max_rounds"] = round_to_json(*sc.max_rounds);
  return h.dump();
}

std::string format_round(const RoundRecord& rec) {
  std::string s;
  s.reserve(96 + 160 * rec.agents.size());
  s += "{\"type\":\"round\",\"r\":";
  put_round(s, rec.r);
  s += ",\"agents\":[";
  bool first = true;
  for (const auto& a : rec.agents) {
    if (!first) s += ',';
    first = false;
    s += "{\"id\":";
    put_int(s, a.id);
    s += ",\"node\":";
    put_int(s, a.node);
    if (a.dormant) {
      s += ",\"dormant\":true}";
      continue;
    }
    if (a.claim) {
      s += ",\"claim\":";
      put_claim(s, *a.claim);
    }
    switch (a.action.kind) {
      case Action::Kind::kStay:
        s += ",\"action\":\"stay\"";
        break;
      case Action::Kind::kMove:
        s += ",\"action\":\"move\",\"port\":";
        put_int(s, a.action.port);
        break;
      case Action::Kind::kDeclare:
        s += ",\"action\":\"declare\"";
        break;
    }
    if (a.clamped) s += ",\"clamped\":true";
    if (a.truth) {
      s += ",\"truth\":{\"tag\":\"";
      s += to_string(a.truth->tag);
      s += "\",\"color\":\"";
      s += to_string(a.truth->color);
      s += "\",\"phase\":";
      put_round(s, Round(a.truth->phase));
      s += ",\"n_i\":";
      put_int(s, a.truth->n_i);
      s += '}';
    }
    s += '}';
  }
  s += "]}";
  return s;
}

std::string format_span(const Round& from, const Round& to) {
  std::string s = "{\"type\":\"span\",\"from\":";
  put_round(s, from);
  s += ",\"to\":";
  put_round(s, to);
  s += '}';
  return s;
}

std::string format_verdict(const Verdict& v) {
  nlohmann::json j = {{"type", "verdict"}, {"kind", to_string(v.kind)}, {"round", round_to_json(v.round)}};
  if (v.kind == Verdict::Kind::kAllDeclared) j["node"] = v.node;
  if (!v.monitor.empty()) j["monitor"] = v.monitor;
  if (!v.detail.empty()) j["detail"] = v.detail;
  return j.dump();
}

ParsedTrace parse_trace(std::istream& in) {
  ParsedTrace t;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      const auto type = j.at("type").get<std::string>();
      if (type == "header") {
        t.header = j;
      } else if (type == "round") {
        RoundRecord rec;
        rec.r = round_from_json(j.at("r"));
        for (const auto& ja : j.at("agents")) {
          AgentRecord a;
          a.id = ja.at("id").get<int>();
          a.node = ja.at("node").get<NodeId>();
          a.dormant = ja.value("dormant", false);
          if (ja.contains("claim")) a.claim = claim_from_json(ja["claim"]);
          const auto act = ja.value("action", std::string("stay"));
          if (act == "move") {
            a.action = Action::MoveBy(ja.at("port").get<Port>());
          } else if (act == "declare") {
            a.action = Action::Declare();
          } else if (act != "stay") {
            throw std::invalid_argument("bad action " + act);
          }
          a.clamped = ja.value("clamped", false);
          if (ja.contains("truth")) {
            const auto& jt = ja["truth"];
            Truth tr;
            tr.tag = parse_tag(jt.at("tag").get<std::string>()).value();
            tr.color = parse_color(jt.at("color").get<std::string>()).value();
            tr.phase = round_from_json(jt.at("phase")).convert_to<std::uint64_t>();
            tr.n_i = jt.at("n_i").get<int>();
            a.truth = tr;
          }
          rec.agents.push_back(std::move(a));
        }
        t.entries.push_back({std::move(rec), std::nullopt});
      } else if (type == "span") {
        if (t.entries.empty()) throw std::invalid_argument("span before any round");
        const Round from = round_from_json(j.at("from"));
        const Round to = round_from_json(j.at("to"));
        auto& last = t.entries.back();
        const Round expect = (last.span_to ? *last.span_to : last.record.r) + 1;
        if (from != expect || to < from) throw std::invalid_argument("span does not continue the previous round");
        last.span_to = to;
      } else if (type == "verdict") {
        Verdict v;
        v.kind = parse_verdict_kind(j.at("kind").get<std::string>()).value();
        v.round = round_from_json(j.at("round"));
        v.node = j.value("node", 0);
        v.monitor = j.value("monitor", std::string());
        v.detail = j.value("detail", std::string());
        t.verdict = v;
      } else {
        throw std::invalid_argument("unknown line type " + type);
      }
    } catch (const std::exception& e) {
      throw std::invalid_argument("trace line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return t;
}

// ---- the round loop ----

namespace {

struct LiveAgent {
  const AgentSpec* spec = nullptr;
  int id = 0;
  NodeId node = 0;
  bool dormant = true;
  std::optional<Port> entry;
  std::unique_ptr<GoodAgent> good;
  std::unique_ptr<Strategy> byz;
  std::optional<Round> woke;
};

std::unique_ptr<GoodAgent> make_good(const Scenario& sc, Label label) {
  if (sc.known) return std::make_unique<KnownAgent>(label, sc.n(), sc.f, sc.cap);
  return std::make_unique<UnknownAgent>(label, sc.f, sc.cap);
}

class Runner {
 public:
  Runner(const Scenario& sc, const RunOptions& opts) : sc_(sc), opts_(opts), monitors_(monitor_context(sc)) {
    for (std::size_t i = 0; i < sc.agents.size(); ++i) {
      LiveAgent a;
      a.spec = &sc.agents[i];
      a.id = static_cast<int>(i);
      a.node = a.spec->start;
      if (!a.spec->good) {
        a.dormant = false;
        a.byz = make_strategy(a.spec->strategy, a.spec->label, mix_seed(sc.seed, i));
      }
      agents_.push_back(std::move(a));
    }
    explo_length_ = sc.n() <= kMaxUxsN ? uxs_for(sc.n()).length() : 0;
  }

  RunResult go() {
    RunResult res;
    if (opts_.sink) opts_.sink->line(format_header(sc_));
    try {
      res.verdict = loop();
    } catch (const CapReached& e) {
      res.verdict = {Verdict::Kind::kCapExceeded, r_, 0, "", e.what()};
    } catch (const EnumerationLimit& e) {
      res.verdict = {Verdict::Kind::kCapExceeded, r_, 0, "", e.what()};
    }
    if (opts_.sink) opts_.sink->line(format_verdict(res.verdict));
    res.stats = stats_;
    for (const auto& a : agents_) res.wake_rounds.push_back(a.woke);
    return res;
  }

 private:
  void wake(LiveAgent& a) {
    a.dormant = false;
    a.woke = r_;
    a.entry.reset();
    a.good = make_good(sc_, a.spec->label);
  }

  std::optional<Round> next_scheduled_wake() const {
    std::optional<Round> best;
    for (const auto& a : agents_) {
      if (a.dormant && a.spec->wake && *a.spec->wake > r_ && (!best || *a.spec->wake < *best)) best = *a.spec->wake;
    }
    return best;
  }

  Verdict loop() {
    const std::size_t m = agents_.size();
    std::vector<std::optional<Claim>> claims(m);
    std::vector<Action> actions(m);
    std::vector<bool> clamped(m);
    std::vector<Observation> obs(m);
    std::vector<ByzDecision> byz(m);
    const bool any_byz = std::any_of(agents_.begin(), agents_.end(), [](const LiveAgent& a) { return a.byz != nullptr; });
    OmniscientView view;
    view.graph = &sc_.graph;
    view.f = sc_.f;
    view.known = sc_.known;
    view.explo_length = explo_length_;

    for (;;) {
      if (sc_.max_rounds && r_ >= *sc_.max_rounds) return {Verdict::Kind::kMaxRounds, r_, 0, "", ""};

      // (1) adversarial wakes, (2) contact wakes
      for (auto& a : agents_) {
        if (a.dormant && a.spec->wake && *a.spec->wake == r_) wake(a);
      }
      for (auto& a : agents_) {
        if (!a.dormant) continue;
        for (const auto& b : agents_) {
          if (&a != &b && !b.dormant && b.node == a.node) {
            wake(a);
            break;
          }
        }
      }

      // (3) claims: good agents first, Byzantine agents see them
      for (std::size_t i = 0; i < m; ++i) {
        auto& a = agents_[i];
        claims[i].reset();
        if (a.good) {
          a.good->arrive(a.entry);
          claims[i] = a.good->claim();
        }
      }
      if (any_byz) {
        view.round = r_;
        view.agents.resize(m);
        for (std::size_t i = 0; i < m; ++i) {
          const auto& a = agents_[i];
          auto& s = view.agents[i];
          s.id = a.id;
          s.label = a.spec->label;
          s.good = a.spec->good;
          s.dormant = a.dormant;
          s.declared = a.good && a.good->declared();
          s.node = a.node;
          s.claim = claims[i];
          s.truth = a.good ? std::optional<Truth>(a.good->truth()) : std::nullopt;
        }
        for (std::size_t i = 0; i < m; ++i) {
          if (!agents_[i].byz) continue;
          byz[i] = agents_[i].byz->act(view, static_cast<int>(i));
        }
        for (std::size_t i = 0; i < m; ++i) {
          if (agents_[i].byz) claims[i] = byz[i].claim;
        }
      }

      // (4) observations
      for (std::size_t i = 0; i < m; ++i) {
        auto& a = agents_[i];
        if (!a.good) continue;
        auto& o = obs[i];
        o.degree = sc_.graph.degree(a.node);
        o.entry = a.entry;
        o.just_woken = a.woke == r_;
        o.others.clear();
        for (std::size_t j = 0; j < m; ++j) {
          if (j != i && claims[j] && agents_[j].node == a.node) o.others.push_back(*claims[j]);
        }
      }

      if (opts_.fast_forward) {
        const Round h = idle_rounds(view, obs);
        if (h >= 2) {
          skip(h, claims, byz);
          if (auto v = after_round()) return *v;
          continue;
        }
      }

      // (5) actions
      ++stats_.stepped_rounds;
      for (std::size_t i = 0; i < m; ++i) {
        auto& a = agents_[i];
        clamped[i] = false;
        actions[i] = Action::Stay();
        if (a.good) {
          actions[i] = a.good->step(obs[i]);
        } else if (a.byz) {
          actions[i] = byz[i].action;
          if (actions[i].kind == Action::Kind::kDeclare) actions[i] = Action::Stay();
          if (actions[i].kind == Action::Kind::kMove &&
              (actions[i].port < 0 || actions[i].port >= sc_.graph.degree(a.node))) {
            actions[i] = Action::Stay();
            clamped[i] = true;
            ++stats_.clamped_moves;
          }
        }
      }

      // (6) record, (7) moves land by the start of the next round
      RoundRecord rec;
      rec.r = r_;
      for (std::size_t i = 0; i < m; ++i) {
        auto& a = agents_[i];
        AgentRecord ar;
        ar.id = a.id;
        ar.node = a.node;
        ar.dormant = a.dormant;
        if (!a.dormant) {
          ar.claim = claims[i];
          ar.action = actions[i];
          ar.clamped = clamped[i];
          if (a.good) ar.truth = a.good->round_truth();
        }
        rec.agents.push_back(std::move(ar));
      }
      for (std::size_t i = 0; i < m; ++i) {
        auto& a = agents_[i];
        if (a.dormant) continue;
        if (actions[i].kind == Action::Kind::kMove) {
          const Landing l = sc_.graph.traverse(a.node, actions[i].port);
          a.node = l.node;
          a.entry = l.port;
        } else {
          a.entry.reset();
        }
      }
      if (auto v = emit(rec)) return *v;
      if (auto v = after_round()) return *v;
    }
  }

  // Rounds, starting with this one, in which nothing but counters change.
  Round idle_rounds(const OmniscientView& view, const std::vector<Observation>& obs) {
    std::optional<Round> h;
    auto take = [&](const Round& x) {
      if (x < 0) return;  // forever
      if (!h || x < *h) h = x;
    };
    for (std::size_t i = 0; i < agents_.size(); ++i) {
      const auto& a = agents_[i];
      if (a.good) {
        if (a.woke == r_) return 0;
        take(a.good->idle_horizon(obs[i]));
      } else if (a.byz) {
        take(a.byz->horizon(view, static_cast<int>(i)));
      }
      if (h && *h < 2) return 0;
    }
    if (auto w = next_scheduled_wake()) take(*w - r_);
    if (sc_.max_rounds) take(*sc_.max_rounds - r_);
    if (!h) return 0;  // nothing bounds the wait: step normally so the run can stall visibly
    return *h;
  }

  void skip(const Round& h, const std::vector<std::optional<Claim>>& claims, const std::vector<ByzDecision>& byz) {
    RoundRecord rec;
    rec.r = r_;
    for (std::size_t i = 0; i < agents_.size(); ++i) {
      auto& a = agents_[i];
      AgentRecord ar;
      ar.id = a.id;
      ar.node = a.node;
      ar.dormant = a.dormant;
      if (!a.dormant) {
        ar.claim = claims[i];
        ar.action = a.byz ? byz[i].action : Action::Stay();
        if (a.good) ar.truth = a.good->truth();
      }
      rec.agents.push_back(std::move(ar));
    }
    for (auto& a : agents_) {
      a.entry.reset();
      if (a.good) a.good->advance_idle(h);
      if (a.byz) a.byz->advance_idle(h - 1);
    }
    ++stats_.spans;
    pending_span_ = r_ + h - 1;
    if (auto v = emit(rec)) {
      stop_ = v;
    }
    r_ += h - 1;
  }

  std::optional<Verdict> emit(const RoundRecord& rec) {
    if (opts_.sink) {
      opts_.sink->line(format_round(rec));
      if (pending_span_) opts_.sink->line(format_span(rec.r + 1, *pending_span_));
    }
    pending_span_.reset();
    if (opts_.monitors) {
      if (auto v = monitors_.on_round(rec)) {
        return Verdict{Verdict::Kind::kMonitorViolation, v->round, 0, v->monitor, v->detail};
      }
    }
    // termination
    bool all = true;
    std::optional<NodeId> node;
    for (std::size_t i = 0; i < agents_.size(); ++i) {
      const auto& a = agents_[i];
      if (!a.spec->good) continue;
      if (a.dormant || !a.good->declared()) {
        all = false;
        break;
      }
      if (rec.agents[i].action.kind == Action::Kind::kDeclare) node = rec.agents[i].node;
    }
    if (all) return Verdict{Verdict::Kind::kAllDeclared, rec.r, node.value_or(0), "", ""};
    return std::nullopt;
  }

  std::optional<Verdict> after_round() {
    if (stop_) return stop_;
    r_ += 1;
    return std::nullopt;
  }

  const Scenario& sc_;
  const RunOptions& opts_;
  Monitors monitors_;
  std::vector<LiveAgent> agents_;
  long explo_length_ = 0;
  Round r_ = 0;
  RunStats stats_;
  std::optional<Round> pending_span_;
  std::optional<Verdict> stop_;
};

}  // namespace

RunResult run(const Scenario& sc, const RunOptions& opts) {
  validate(sc);
  Runner runner(sc, opts);
  return runner.go();
}

}  // namespace byzg
