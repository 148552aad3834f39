#include "byzg/harness.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <stdexcept>

#include "byzg/monitors.hpp"

namespace byzg {

namespace {

std::uint64_t fnv(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

const std::vector<std::string> kSchedules = {"simultaneous", "staggered", "contact_only"};

}  // namespace

CorpusSpec corpus_from_json(const nlohmann::json& j) {
  CorpusSpec c;
  c.name = j.value("name", c.name);
  const auto mode = j.at("mode").get<std::string>();
  if (mode != "known" && mode != "unknown") throw std::invalid_argument("corpus mode must be known or unknown");
  c.known = mode == "known";
  for (const auto& g : j.at("graphs")) {
    const auto kind = parse_graph_kind(g.get<std::string>());
    if (!kind) throw std::invalid_argument("unknown graph family " + g.get<std::string>());
    c.graphs.push_back(*kind);
  }
  c.sizes = j.at("sizes").get<std::vector<int>>();
  c.fs = j.at("f").get<std::vector<int>>();
  c.strategies = j.at("strategies").get<std::vector<std::string>>();
  for (const auto& s : c.strategies) {
    if (!is_registered(s)) throw std::invalid_argument("unknown strategy " + s);
    if (s == "scripted") throw std::invalid_argument("scripted strategies need a scenario file, not a corpus");
  }
  c.schedules = j.at("schedules").get<std::vector<std::string>>();
  for (const auto& s : c.schedules) {
    if (std::find(kSchedules.begin(), kSchedules.end(), s) == kSchedules.end()) {
      throw std::invalid_argument("unknown schedule " + s);
    }
  }
  c.seed = j.value("seed", c.seed);
  c.cap = j.value("cap", c.cap);
  c.note = j.value("note", std::string());
  if (j.contains("skip")) {
    for (const auto& s : j["skip"]) {
      CorpusSkip k;
      if (s.contains("n")) k.n = s["n"].get<int>();
      if (s.contains("f")) k.f = s["f"].get<int>();
      if (s.contains("strategies")) k.strategies = s["strategies"].get<std::vector<std::string>>();
      k.reason = s.at("reason").get<std::string>();
      c.skips.push_back(k);
    }
  }
  return c;
}

CorpusSpec load_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  try {
    return corpus_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
}

void apply_schedule(Scenario& sc, const std::string& schedule) {
  std::vector<AgentSpec*> good;
  for (auto& a : sc.agents) {
    if (a.good) good.push_back(&a);
  }
  if (schedule == "simultaneous") {
    for (auto* a : good) a->wake = Round(0);
  } else if (schedule == "staggered") {
    for (std::size_t j = 0; j < good.size(); ++j) good[j]->wake = Round(j);
  } else if (schedule == "contact_only") {
    if (good.size() < 2) throw std::invalid_argument("contact_only needs at least two good agents");
    for (auto* a : good) a->wake = Round(0);
    good.back()->wake.reset();
  } else {
    throw std::invalid_argument("unknown schedule " + schedule);
  }
}

Expansion expand(const CorpusSpec& spec) {
  Expansion out;
  const std::string mode = spec.known ? "known" : "unknown";
  for (const auto kind : spec.graphs) {
    for (const int n : spec.sizes) {
      for (const int f : spec.fs) {
        const int k = spec.known ? f + 1 : f + 2;
        const int byz = std::max(0, std::min(f, n - k));
        bool collapsed = false;
        for (const auto& strategy : spec.strategies) {
          for (const auto& schedule : spec.schedules) {
            const std::string strat = byz == 0 ? "none" : strategy;
            const std::string id = mode + "-" + to_string(kind) + "-n" + std::to_string(n) + "-f" + std::to_string(f) +
                                   "-" + strat + "-" + schedule;
            auto skip = [&](const std::string& why) { out.skipped.push_back({mode + "-" + to_string(kind) + "-n" +
                                                                                 std::to_string(n) + "-f" + std::to_string(f) +
                                                                                 "-" + strategy + "-" + schedule,
                                                                             why}); };
            if (k > n) {
              skip(std::to_string(k) + " good agents need distinct start nodes, the graph has " + std::to_string(n));
              continue;
            }
            if (byz == 0 && collapsed) {
              skip("no node left for a Byzantine agent; covered by " + mode + "-" + to_string(kind) + "-n" +
                   std::to_string(n) + "-f" + std::to_string(f) + "-none-" + schedule);
              continue;
            }
            if (schedule == "contact_only" && k < 2) {
              skip("contact_only needs a second good agent");
              continue;
            }
            const CorpusSkip* rule = nullptr;
            for (const auto& s : spec.skips) {
              if (s.n && *s.n != n) continue;
              if (s.f && *s.f != f) continue;
              if (!s.strategies.empty() &&
                  std::find(s.strategies.begin(), s.strategies.end(), strategy) == s.strategies.end()) {
                continue;
              }
              rule = &s;
              break;
            }
            if (rule && byz > 0) {
              skip(rule->reason);
              continue;
            }
            Scenario sc;
            try {
              sc.graph = generate(kind, {n, 0}, spec.seed);
            } catch (const std::invalid_argument& e) {
              skip(e.what());
              continue;
            }
            sc.id = id;
            sc.known = spec.known;
            sc.f = f;
            sc.cap = spec.cap;
            sc.seed = mix_seed(spec.seed, fnv(id));
            for (int j = 0; j < k; ++j) sc.agents.push_back({j + 1, j, true, std::nullopt, {}});
            for (int j = 0; j < byz; ++j) {
              AgentSpec a{k + j + 1, k + j, false, std::nullopt, {}};
              a.strategy.name = strategy;
              sc.agents.push_back(a);
            }
            apply_schedule(sc, schedule);
            sc.max_rounds = liveness_bound_upfront(sc) + 1;
            validate(sc);
            out.entries.push_back({std::move(sc), to_string(kind), strat, schedule});
          }
          if (byz == 0) collapsed = true;
        }
      }
    }
  }
  return out;
}

std::uint64_t true_index(const Scenario& sc) {
  Configuration c;
  c.graph = sc.graph;
  for (const auto& a : sc.agents) {
    if (a.good) c.placements[a.label] = a.start;
  }
  const EnumMode mode = sc.known ? EnumMode::Known(sc.n(), sc.f) : EnumMode::Unknown(sc.f);
  return enumerator(mode).min_index_of(c);
}

namespace {

Round bound_with(const Scenario& sc, const Round& w_max) {
  const std::uint64_t i = true_index(sc);
  if (sc.known) return w_max + Round(2) * t_explo(sc.n()) + Round(i) * q_duration(sc.n());
  const Round q = unknown_q(sc.f, i);
  return w_max + q + z_duration(enumerator(EnumMode::Unknown(sc.f)).at(i).size(), q);
}

}  // namespace

Round liveness_bound(const Scenario& sc, const std::vector<std::optional<Round>>& wake_rounds) {
  Round w_max = 0;
  for (std::size_t i = 0; i < sc.agents.size() && i < wake_rounds.size(); ++i) {
    if (sc.agents[i].good && wake_rounds[i] && *wake_rounds[i] > w_max) w_max = *wake_rounds[i];
  }
  return bound_with(sc, w_max);
}

Round liveness_bound_upfront(const Scenario& sc) {
  std::optional<Round> first;
  Round last = 0;
  bool contact = false;
  for (const auto& a : sc.agents) {
    if (!a.good) continue;
    if (!a.wake) {
      contact = true;
      continue;
    }
    if (!first || *a.wake < *first) first = *a.wake;
    if (*a.wake > last) last = *a.wake;
  }
  if (contact && first) last = std::max(last, *first + wake_bound(sc.known, sc.n(), sc.f));
  return bound_with(sc, last);
}

IdealPrediction oracle_ideal(const Scenario& sc) {
  if (sc.f != 0) throw std::invalid_argument("oracle_ideal needs a Byzantine-free scenario");
  IdealPrediction p;
  p.i_star = true_index(sc);
  const AgentSpec* smallest = nullptr;
  for (const auto& a : sc.agents) {
    if (a.good && (!smallest || a.label < smallest->label)) smallest = &a;
  }
  if (!smallest) throw std::invalid_argument("oracle_ideal needs a good agent");
  p.target = smallest->start;
  return p;
}

const char* to_string(IdealOutcome o) {
  switch (o) {
    case IdealOutcome::kConfirmed:
      return "confirmed";
    case IdealOutcome::kEarlierDeclaration:
      return "earlier_declaration";
    case IdealOutcome::kViolated:
      return "violated";
  }
  return "?";
}

IdealOutcome check_ideal(const ParsedTrace& trace, const IdealPrediction& p, std::string* detail) {
  const auto ctx = monitor_context(trace.header);
  auto say = [&](const std::string& s) {
    if (detail) *detail = s;
  };
  bool built = false;
  for (const auto& e : trace.entries) {
    const auto& rec = e.record;
    bool all_building = true;
    bool any_in_phase = false;
    for (std::size_t i = 0; i < rec.agents.size(); ++i) {
      if (!ctx.good[i]) continue;
      const auto& a = rec.agents[i];
      if (a.dormant || !a.truth) {
        all_building = false;
        continue;
      }
      if (a.action.kind == Action::Kind::kDeclare && a.truth->phase < p.i_star) {
        say("declared in phase " + std::to_string(a.truth->phase) + " before phase " + std::to_string(p.i_star));
        return IdealOutcome::kEarlierDeclaration;
      }
      if (a.truth->phase == p.i_star) any_in_phase = true;
      if (a.truth->phase != p.i_star || a.truth->tag != Tag::kTowerBuilder) {
        all_building = false;
      } else if (a.node != p.target) {
        say("agent " + std::to_string(i) + " builds at node " + std::to_string(a.node) + " in round " + rec.r.str());
        return IdealOutcome::kViolated;
      }
    }
    if (all_building) built = true;
    if (any_in_phase && built) {
      say("all good agents build at node " + std::to_string(p.target) + " in phase " + std::to_string(p.i_star));
      return IdealOutcome::kConfirmed;
    }
  }
  say("phase " + std::to_string(p.i_star) + " never had every good agent building together");
  return IdealOutcome::kViolated;
}

ScenarioResult run_entry(const CorpusEntry& e, const BatchOptions& opts) {
  const auto& sc = e.scenario;
  ScenarioResult r;
  r.id = sc.id;
  r.mode = sc.known ? "known" : "unknown";
  r.graph = e.graph;
  r.n = sc.n();
  r.f = sc.f;
  r.k_good = sc.good_count();
  r.strategy = e.strategy;
  r.schedule = e.schedule;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    HashSink hash;
    std::unique_ptr<FileSink> file;
    std::vector<TraceSink*> sinks{&hash};
    if (!opts.trace_dir.empty()) {
      file = std::make_unique<FileSink>(opts.trace_dir + "/" + sc.id + ".jsonl");
      sinks.push_back(file.get());
    }
    TeeSink tee(sinks);
    RunOptions ro;
    ro.fast_forward = opts.fast_forward;
    ro.sink = &tee;
    const RunResult res = run(sc, ro);
    r.verdict = res.verdict;
    r.stepped_rounds = res.stats.stepped_rounds;
    r.trace_hash = hash.hex();
    r.trace_bytes = hash.bytes();
    r.i_star = true_index(sc);
    r.bound = liveness_bound(sc, res.wake_rounds);
    if (res.verdict.kind == Verdict::Kind::kAllDeclared) {
      r.declare_round = res.verdict.round;
      r.margin = r.bound - res.verdict.round;
    }
  } catch (const std::exception& ex) {
    r.error = ex.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

std::vector<ScenarioResult> run_batch(const std::vector<CorpusEntry>& entries, const BatchOptions& opts) {
  std::vector<ScenarioResult> out(entries.size());
  const long m = static_cast<long>(entries.size());
  if (opts.parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (long i = 0; i < m; ++i) out[i] = run_entry(entries[i], opts);
  } else {
    for (long i = 0; i < m; ++i) out[i] = run_entry(entries[i], opts);
  }
  return out;
}

namespace {

std::string csv_round(const std::optional<Round>& r) { return r ? r->str() : ""; }

}  // namespace

void write_summary_csv(const std::vector<ScenarioResult>& results, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "scenario_id,mode,n,f,k_good,strategy,verdict,declare_round,bound,margin,graph,schedule,i_star,trace_hash,"
         "stepped_rounds,seconds\n";
  for (const auto& r : results) {
    const std::string verdict = r.error.empty() ? to_string(r.verdict.kind) : "LoadError";
    out << r.id << ',' << r.mode << ',' << r.n << ',' << r.f << ',' << r.k_good << ',' << r.strategy << ',' << verdict
        << ',' << csv_round(r.declare_round) << ',' << r.bound.str() << ',' << csv_round(r.margin) << ',' << r.graph
        << ',' << r.schedule << ',' << r.i_star << ',' << r.trace_hash << ',' << r.stepped_rounds << ',' << r.seconds
        << '\n';
  }
}

nlohmann::json summary_json(const std::vector<ScenarioResult>& results, const std::vector<SkippedEntry>& skipped) {
  nlohmann::json rows = nlohmann::json::array();
  std::map<std::string, int> tally;
  for (const auto& r : results) {
    const std::string verdict = r.error.empty() ? to_string(r.verdict.kind) : "LoadError";
    ++tally[verdict];
    nlohmann::json row = {{"scenario_id", r.id},
                          {"mode", r.mode},
                          {"graph", r.graph},
                          {"n", r.n},
                          {"f", r.f},
                          {"k_good", r.k_good},
                          {"strategy", r.strategy},
                          {"schedule", r.schedule},
                          {"verdict", verdict},
                          {"declare_round", r.declare_round ? round_to_json(*r.declare_round) : nlohmann::json(nullptr)},
                          {"bound", round_to_json(r.bound)},
                          {"margin", r.margin ? round_to_json(*r.margin) : nlohmann::json(nullptr)},
                          {"i_star", r.i_star},
                          {"trace_hash", r.trace_hash},
                          {"trace_bytes", r.trace_bytes},
                          {"stepped_rounds", r.stepped_rounds},
                          {"seconds", r.seconds}};
    if (!r.verdict.monitor.empty()) row["monitor"] = r.verdict.monitor;
    if (!r.verdict.detail.empty()) row["detail"] = r.verdict.detail;
    if (!r.error.empty()) row["error"] = r.error;
    rows.push_back(row);
  }
  nlohmann::json skips = nlohmann::json::array();
  for (const auto& s : skipped) skips.push_back({{"scenario_id", s.id}, {"reason", s.reason}});
  return {{"scenarios", rows}, {"verdicts", tally}, {"skipped", skips}};
}

Scenario scenario_from_json(const nlohmann::json& j, const std::string& base_dir) {
  try {
    Scenario sc;
    sc.id = j.value("id", sc.id);
    const auto mode = j.value("mode", std::string("known"));
    if (mode != "known" && mode != "unknown") throw std::invalid_argument("mode must be known or unknown");
    sc.known = mode == "known";
    sc.f = j.value("f", 0);
    sc.seed = j.value("seed", sc.seed);
    sc.cap = j.value("cap", sc.cap);
    if (j.contains("max_rounds") && !j["max_rounds"].is_null()) sc.max_rounds = round_from_json(j["max_rounds"]);
    const auto& g = j.at("graph");
    if (g.contains("adj")) {
      sc.graph = graph_from_json(g);
    } else {
      const auto kind = parse_graph_kind(g.at("kind").get<std::string>());
      if (!kind) throw std::invalid_argument("unknown graph kind");
      sc.graph = generate(*kind, {g.at("n").get<int>(), g.value("extra_edges", 0)}, g.value("seed", std::uint64_t{0}));
    }
    for (const auto& ja : j.at("agents")) {
      AgentSpec a;
      a.label = ja.at("label").get<Label>();
      a.start = ja.at("start").get<NodeId>();
      a.good = ja.value("good", true);
      if (a.good) {
        if (ja.contains("wake") && !ja["wake"].is_null()) a.wake = round_from_json(ja["wake"]);
      } else {
        a.strategy.name = ja.value("strategy", std::string("sleeper"));
        if (ja.contains("target")) a.strategy.target = ja["target"].get<Label>();
        if (ja.contains("script")) {
          std::filesystem::path p = ja["script"].get<std::string>();
          if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
          a.strategy.script_path = p.string();
          a.strategy.script = load_script(a.strategy.script_path);
        } else if (a.strategy.name == "scripted") {
          throw std::invalid_argument("scripted agent without a script");
        }
      }
      sc.agents.push_back(std::move(a));
    }
    if (j.contains("schedule")) apply_schedule(sc, j["schedule"].get<std::string>());
    validate(sc);
    return sc;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("scenario: ") + e.what());
  }
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
  return scenario_from_json(j, std::filesystem::path(path).parent_path().string());
}

nlohmann::json scenario_to_json(const Scenario& sc) {
  nlohmann::json agents = nlohmann::json::array();
  for (const auto& a : sc.agents) {
    nlohmann::json ja = {{"label", a.label}, {"start", a.start}, {"good", a.good}};
    if (a.good) {
      ja["wake"] = a.wake ? round_to_json(*a.wake) : nlohmann::json(nullptr);
    } else {
      ja["strategy"] = a.strategy.name;
      if (a.strategy.target) ja["target"] = *a.strategy.target;
      if (!a.strategy.script_path.empty()) ja["script"] = a.strategy.script_path;
    }
    agents.push_back(ja);
  }
  nlohmann::json j = {{"id", sc.id},     {"mode", sc.known ? "known" : "unknown"}, {"f", sc.f},
                      {"seed", sc.seed}, {"cap", sc.cap},                          {"graph", graph_to_json(sc.graph)},
                      {"agents", agents}};
  if (sc.max_rounds) j["max_rounds"] = round_to_json(*sc.max_rounds);
  return j;
}

std::string output_dir() {
  const char* d = std::getenv("BYZG_OUT");
  return d && *d ? d : "out";
}

}  // namespace byzg
