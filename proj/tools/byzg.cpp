// Command-line front end: run, replay, batch, graph gen, uxs, enum peek, bound.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "byzg/harness.hpp"
#include "byzg/monitors.hpp"

using namespace byzg;
using nlohmann::json;

namespace {

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> cap;
  std::optional<std::string> max_rounds;

  void apply(Scenario& sc) const {
    if (seed) sc.seed = *seed;
    if (cap) sc.cap = *cap;
    if (max_rounds) sc.max_rounds = Round(*max_rounds);
  }
};

void add_overrides(CLI::App* app, Overrides& o) {
  app->add_option("--seed", o.seed, "Override the scenario seed");
  app->add_option("--cap", o.cap, "Last enumeration phase an agent may start");
  app->add_option("--max-rounds", o.max_rounds, "Stop before this round")->check([](const std::string& s) {
    return !s.empty() && s.find_first_not_of("0123456789") == std::string::npos ? "" : "must be a non-negative integer";
  });
}

json uxs_json(const Uxs& u) {
  return {{"N", u.cap_n}, {"steps", u.steps}, {"verified", u.verified}, {"corpus_hash", u.corpus_hash}};
}

json config_json(const Configuration& c) {
  json pl = json::object();
  for (const auto& [l, v] : c.placements) pl[std::to_string(l)] = v;
  return {{"graph", graph_to_json(c.graph)}, {"placements", pl}};
}

int cmd_run(const std::string& path, const std::string& trace, bool no_ff, const Overrides& o) {
  Scenario sc;
  try {
    sc = load_scenario(path);
    o.apply(sc);
    validate(sc);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitLoadError;
  }
  std::unique_ptr<FileSink> file;
  if (!trace.empty()) file = std::make_unique<FileSink>(trace);
  RunOptions ro;
  ro.fast_forward = !no_ff;
  ro.sink = file.get();
  const RunResult res = run(sc, ro);
  const Round bound = liveness_bound(sc, res.wake_rounds);
  json out = json::parse(format_verdict(res.verdict));
  out["bound"] = round_to_json(bound);
  out["stepped_rounds"] = res.stats.stepped_rounds;
  std::cout << out.dump() << "\n";
  return exit_code(res.verdict.kind);
}

int cmd_replay(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    std::cerr << "error: cannot open " << path << "\n";
    return kExitLoadError;
  }
  ParsedTrace t;
  try {
    t = parse_trace(in);
    if (t.header.is_null()) throw std::invalid_argument("trace has no header line");
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitLoadError;
  }
  const auto violations = check_trace(t);
  for (const auto& v : violations) {
    std::cout << json{{"monitor", v.monitor}, {"round", round_to_json(v.round)}, {"detail", v.detail}}.dump() << "\n";
  }
  if (!violations.empty()) return exit_code(Verdict::Kind::kMonitorViolation);
  std::cout << json{{"monitors", "ok"}, {"records", t.entries.size()}}.dump() << "\n";
  return t.verdict ? exit_code(t.verdict->kind) : 0;
}

int cmd_batch(const std::string& path, std::string out_dir, bool traces, bool serial, const Overrides& o) {
  CorpusSpec spec;
  Expansion ex;
  try {
    spec = load_corpus(path);
    if (o.seed) spec.seed = *o.seed;
    if (o.cap) spec.cap = *o.cap;
    ex = expand(spec);
    if (o.max_rounds) {
      for (auto& e : ex.entries) e.scenario.max_rounds = Round(*o.max_rounds);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitLoadError;
  }
  if (out_dir.empty()) out_dir = output_dir();
  std::filesystem::create_directories(out_dir);
  BatchOptions bo;
  bo.parallel = !serial;
  if (traces) {
    bo.trace_dir = out_dir + "/traces";
    std::filesystem::create_directories(bo.trace_dir);
  }
  const auto results = run_batch(ex.entries, bo);
  write_summary_csv(results, out_dir + "/summary.csv");
  std::ofstream(out_dir + "/summary.json") << summary_json(results, ex.skipped).dump(2) << "\n";
  int worst = 0;
  for (const auto& r : results) {
    const int code = r.error.empty() ? exit_code(r.verdict.kind) : kExitLoadError;
    if (code != 0) worst = worst == 0 ? code : std::min(worst, code);
  }
  std::cout << json{{"scenarios", results.size()}, {"skipped", ex.skipped.size()}, {"out", out_dir}}.dump() << "\n";
  return worst;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Byzantine gathering simulator"};
  app.require_subcommand(1);

  Overrides run_o;
  std::string scenario_path, trace_path, replay_path;
  bool no_ff = false;
  auto* run = app.add_subcommand("run", "Run one scenario file, or replay a trace through the monitors");
  run->add_option("scenario", scenario_path, "Scenario JSON");
  run->add_option("--trace", trace_path, "Write the JSONL trace here");
  run->add_option("--replay", replay_path, "Check an existing trace instead of running");
  run->add_flag("--no-fast-forward", no_ff, "Step every round one by one");
  add_overrides(run, run_o);

  Overrides batch_o;
  std::string corpus_path, out_dir;
  bool traces = false, serial = false;
  auto* batch = app.add_subcommand("batch", "Run a corpus and write summary.csv and summary.json");
  batch->add_option("corpus", corpus_path, "Corpus JSON")->required();
  batch->add_option("--out", out_dir, "Output directory (default $BYZG_OUT or ./out)");
  batch->add_flag("--traces", traces, "Also keep every trace file");
  batch->add_flag("--serial", serial, "One scenario at a time");
  add_overrides(batch, batch_o);

  auto* graph = app.add_subcommand("graph", "Graph utilities");
  graph->require_subcommand(1);
  std::string kind = "ring";
  int gn = 3, extra = 0;
  std::uint64_t gseed = 0;
  auto* gen = graph->add_subcommand("gen", "Print a generated graph as JSON");
  gen->add_option("--kind", kind, "path, ring, star, complete or random_connected");
  gen->add_option("--n", gn, "Node count")->check(CLI::PositiveNumber);
  gen->add_option("--extra", extra, "Extra edges for random_connected");
  gen->add_option("--seed", gseed, "Generator seed");

  auto* uxs = app.add_subcommand("uxs", "Exploration sequences");
  uxs->require_subcommand(1);
  int un = 4;
  std::string uxs_out, uxs_cache;
  auto* build = uxs->add_subcommand("build", "Build the sequence for N and print or cache it");
  build->add_option("--n", un, "Size bound N")->check(CLI::Range(1, kMaxUxsN));
  build->add_option("--out", uxs_out, "Cache file to write");
  auto* verify = uxs->add_subcommand("verify", "Verify a sequence on every graph of size <= N");
  verify->add_option("--n", un, "Size bound N")->check(CLI::Range(1, kMaxUxsN));
  verify->add_option("--cache", uxs_cache, "Verify this cache file instead of the built-in provider");

  auto* en = app.add_subcommand("enum", "Configuration enumeration");
  en->require_subcommand(1);
  std::string emode = "known";
  int en_n = 2, en_f = 0;
  std::uint64_t from = 1, count = 10;
  auto* peek = en->add_subcommand("peek", "Print a slice of the enumeration");
  peek->add_option("--mode", emode, "known or unknown")->check(CLI::IsMember({"known", "unknown"}));
  peek->add_option("--n", en_n, "Graph size (known mode)")->check(CLI::PositiveNumber);
  peek->add_option("--f", en_f, "Byzantine bound")->check(CLI::NonNegativeNumber);
  peek->add_option("--from", from, "First index, 1-based")->check(CLI::PositiveNumber);
  peek->add_option("--count", count, "How many");

  Overrides bound_o;
  std::string bound_path;
  auto* bound = app.add_subcommand("bound", "Print i* and the liveness bound of a scenario");
  bound->add_option("scenario", bound_path, "Scenario JSON")->required();
  add_overrides(bound, bound_o);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      if (!replay_path.empty()) return cmd_replay(replay_path);
      if (scenario_path.empty()) {
        std::cerr << "error: run needs a scenario file or --replay\n";
        return kExitLoadError;
      }
      return cmd_run(scenario_path, trace_path, no_ff, run_o);
    }
    if (batch->parsed()) return cmd_batch(corpus_path, out_dir, traces, serial, batch_o);
    if (gen->parsed()) {
      const auto k = parse_graph_kind(kind);
      if (!k) {
        std::cerr << "error: unknown graph kind " << kind << "\n";
        return kExitLoadError;
      }
      std::cout << graph_to_json(generate(*k, {gn, extra}, gseed)).dump() << "\n";
      return 0;
    }
    if (build->parsed()) {
      const json j = uxs_json(uxs_for(un));
      if (uxs_out.empty()) {
        std::cout << j.dump() << "\n";
      } else {
        std::ofstream(uxs_out) << j.dump() << "\n";
      }
      return 0;
    }
    if (verify->parsed()) {
      Uxs u = uxs_for(un);
      if (!uxs_cache.empty()) {
        std::ifstream in(uxs_cache);
        if (!in) throw std::invalid_argument("cannot open " + uxs_cache);
        const json j = json::parse(in);
        u.cap_n = j.at("N").get<int>();
        u.steps = j.at("steps").get<std::vector<int>>();
        u.verified = j.value("verified", std::string("exhaustive"));
        u.corpus_hash = j.value("corpus_hash", std::string());
        if (u.cap_n != un) throw std::invalid_argument("cache is for N=" + std::to_string(u.cap_n));
      }
      const bool exhaustive = un <= 4;
      const auto graphs = exhaustive ? all_graphs_up_to(un) : uxs_corpus(un);
      const auto bad = verify_uxs_parallel(u, graphs);
      json out = {{"N", un}, {"length", u.length()}, {"graphs", graphs.size()},
                  {"scope", exhaustive ? "exhaustive" : "corpus"}, {"ok", !bad}};
      if (bad) out["counterexample"] = {{"graph", graph_to_json(graphs[bad->graph_index])}, {"start", bad->start},
                                         {"unvisited", bad->unvisited}};
      std::cout << out.dump() << "\n";
      return bad ? 1 : 0;
    }
    if (peek->parsed()) {
      const EnumMode mode = emode == "known" ? EnumMode::Known(en_n, en_f) : EnumMode::Unknown(en_f);
      const auto& e = enumerator(mode);
      for (std::uint64_t i = from; i < from + count; ++i) {
        json row = config_json(e.at(i));
        row["index"] = i;
        std::cout << row.dump() << "\n";
      }
      return 0;
    }
    if (bound->parsed()) {
      Scenario sc = load_scenario(bound_path);
      bound_o.apply(sc);
      std::cout << json{{"i_star", true_index(sc)}, {"bound", round_to_json(liveness_bound_upfront(sc))}}.dump() << "\n";
      return 0;
    }
  } catch (const EnumerationLimit& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(Verdict::Kind::kCapExceeded);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitLoadError;
  }
  return 0;
}
