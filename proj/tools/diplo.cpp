// diplo: command-line front end of the engine.

#include <glob.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "diplo/analysis.hpp"
#include "diplo/error.hpp"
#include "diplo/ingest.hpp"
#include "diplo/protocol.hpp"
#include "diplo/scenario.hpp"
#include "diplo/tournament.hpp"

namespace fs = std::filesystem;
using namespace diplo;

namespace {

// Exit codes.
constexpr int kOk = 0;
constexpr int kFailed = 1;  // the command ran and found problems
constexpr int kBadInput = 2;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArgumentError("cannot read " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) throw ArgumentError("cannot write " + path);
}

// Writes to `path`, or to standard output when it is empty or "-".
void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-")
    std::cout << text;
  else
    write_file(path, text);
}

// "random×7", "random*7", "greedy,dumbbot*6" or seven comma-separated specs.
std::vector<std::string> expand_agents(const std::string& spec) {
  std::vector<std::string> out;
  std::stringstream items(spec);
  std::string item;
  while (std::getline(items, item, ',')) {
    int count = 1;
    for (const std::string mark : {"\xC3\x97", "*", "x"}) {
      const auto at = item.rfind(mark);
      if (at == std::string::npos || at + mark.size() >= item.size()) continue;
      const std::string digits = item.substr(at + mark.size());
      if (digits.find_first_not_of("0123456789") != std::string::npos) continue;
      count = std::stoi(digits);
      item = item.substr(0, at);
      break;
    }
    if (item.empty() || count < 1) throw ArgumentError("bad agent list '" + spec + "'");
    check_agent_spec(item);
    out.insert(out.end(), count, item);
  }
  return out;
}

std::vector<std::string> expand_paths(const std::vector<std::string>& patterns) {
  std::vector<std::string> out;
  for (const std::string& pat : patterns) {
    if (fs::is_directory(pat)) {
      std::vector<std::string> inside;
      for (const auto& e : fs::directory_iterator(pat))
        if (e.is_regular_file() && (e.path().extension() == ".json" || e.path().extension() == ".jsonl"))
          inside.push_back(e.path().string());
      std::sort(inside.begin(), inside.end());
      out.insert(out.end(), inside.begin(), inside.end());
      continue;
    }
    glob_t g{};
    if (::glob(pat.c_str(), 0, nullptr, &g) == 0)
      for (std::size_t i = 0; i < g.gl_pathc; ++i) out.emplace_back(g.gl_pathv[i]);
    ::globfree(&g);
  }
  return out;
}

// Records from archives; unreadable entries are reported and skipped.
std::vector<GameRecord> load_records(const std::vector<std::string>& patterns, int& unreadable) {
  const std::vector<std::string> files = expand_paths(patterns);
  std::vector<GameRecord> out;
  for (const std::string& f : files) {
    const auto entries = read_archive(standard_map(), read_file(f));
    for (std::size_t i = 0; i < entries.size(); ++i) {
      if (entries[i].record) {
        out.push_back(*entries[i].record);
      } else {
        ++unreadable;
        std::cerr << f << " entry " << i << ": " << entries[i].error << "\n";
      }
    }
  }
  return out;
}

Entrant entrant_for(const std::string& spec) {
  check_agent_spec(spec);
  return {spec, [spec] { return make_agent(spec); }};
}

Rules rules_with(int last_year) {
  Rules r;
  r.last_year = last_year;
  return r;
}

// ---------------------------------------------------------------------------

int cmd_adjudicate(const std::string& path) {
  const MapGraph& map = standard_map();
  std::vector<Scenario> scenarios;
  try {
    scenarios = parse_scenarios(map, read_file(path));
  } catch (const ScenarioError& e) {
    std::cerr << path << ": " << e.what() << "\n";
    return kBadInput;
  }
  if (scenarios.empty()) {
    std::cerr << path << ": no cases\n";
    return kBadInput;
  }
  int failed = 0;
  for (const Scenario& sc : scenarios) {
    const ScenarioResult r = run_scenario(map, sc);
    std::cout << "case " << sc.id << (sc.title.empty() ? "" : " " + sc.title) << "\n";
    for (const StepOutcome& step : r.steps) std::cout << format_step_report(map, step);
    for (const std::string& f : r.failures) std::cout << "  expectation failed: " << f << "\n";
    failed += !r.passed();
  }
  if (failed) std::cout << failed << " of " << scenarios.size() << " cases failed their expectations\n";
  return failed ? kFailed : kOk;
}

struct PlayOptions {
  std::string agents = "random*7";
  int games = 1;
  std::uint64_t seed = 0;
  std::string out;
  int last_year = Rules{}.last_year;
  int threads = 1;
  bool verbose = false;
};

int cmd_play(const PlayOptions& o) {
  const MapGraph& map = standard_map();
  const std::vector<std::string> seats = expand_agents(o.agents);
  if (seats.size() != kNumPowers)
    throw ArgumentError("need 7 agents, got " + std::to_string(seats.size()) + " from '" + o.agents + "'");
  std::vector<std::vector<std::string>> logs;
  const auto records = run_games(
      map, o.games, o.seed,
      [&](int) {
        SeatAssignment a;
        for (int p = 0; p < kNumPowers; ++p) a.agents[p] = make_agent(seats[p]);
        return a;
      },
      rules_with(o.last_year), o.threads, &logs);

  if (!o.out.empty()) fs::create_directories(o.out);
  for (std::size_t i = 0; i < records.size(); ++i) {
    const GameRecord& r = records[i];
    if (!logs[i].empty()) {
      std::cerr << "warning: game " << i << ": " << logs[i].size() << " agent notes, first: " << logs[i].front() << "\n";
      if (o.verbose)
        for (const std::string& n : logs[i]) std::cerr << "  " << n << "\n";
    }
    const std::string last = r.phases.empty() ? r.initial.phase().code() : r.phases.back().name;
    std::string line = "game " + std::to_string(i) + " seed " + std::to_string(o.seed + i) + ": " +
                       std::string(outcome_kind_name(r.outcome.kind));
    if (r.outcome.winner) line += " " + std::string(power_name(*r.outcome.winner));
    line += " after " + last;
    if (o.out.empty()) {
      std::cerr << line << "\n";
      std::cout << record_to_json(map, r).dump() << "\n";
    } else {
      char name[32];
      std::snprintf(name, sizeof name, "game_%05zu.json", i);
      write_file((fs::path(o.out) / name).string(), write_record(map, r));
      std::cout << line << "\n";
    }
  }
  return kOk;
}

struct TournamentOptions {
  std::string mode = "pool";
  std::string agents = "random,greedy,dumbbot,hold";
  int games = 100;
  std::uint64_t seed = 0;
  int last_year = Rules{}.last_year;
  int threads = 1;
  std::string format = "csv";
  std::string out;
  std::string sigma_trace;
};

int cmd_tournament(const TournamentOptions& o) {
  const MapGraph& map = standard_map();
  std::vector<Entrant> entrants;
  std::stringstream items(o.agents);
  for (std::string item; std::getline(items, item, ',');) entrants.push_back(entrant_for(item));
  const bool json = o.format == "json";
  if (o.mode == "1v6") {
    if (entrants.size() != 2) throw ArgumentError("1v6 takes two agents: A,B");
    const OneVsSixSummary s = run_1v6(map, entrants[0], entrants[1], o.games, o.seed, rules_with(o.last_year), o.threads);
    emit(o.out, json ? one_vs_six_json(s) : one_vs_six_csv(s));
    const ChiSquare c = seat_homogeneity(s);
    std::fprintf(stderr, "seat homogeneity: chi2 %.4f, dof %d, p %.4f\n", c.statistic, c.dof, c.p_value);
    return kOk;
  }
  if (o.mode != "pool") throw ArgumentError("unknown mode '" + o.mode + "'");
  const PoolResult r = run_pool(map, entrants, o.games, o.seed, {}, rules_with(o.last_year), o.threads);
  emit(o.out, json ? pool_json(r) : pool_csv(r));
  if (!o.sigma_trace.empty()) write_file(o.sigma_trace, sigma_trace_csv(r));
  return kOk;
}

struct AnalyzeOptions {
  std::string metric;
  std::vector<std::string> records;
  std::string format = "csv";
  std::string variant = "records";
  std::string out;
};

int cmd_analyze(const AnalyzeOptions& o) {
  const MapGraph& map = standard_map();
  int unreadable = 0;
  const std::vector<GameRecord> records = load_records(o.records, unreadable);
  if (records.empty()) {
    std::cerr << "no records\n";
    return kBadInput;
  }
  const bool json = o.format == "json";
  if (o.metric == "coalition") {
    const CoalitionReport r = coalition_metrics(map, records);
    for (const std::string& why : r.rejections) std::cerr << "rejected " << why << "\n";
    emit(o.out, json ? coalition_json(r, o.variant) : coalition_csv(r, o.variant));
  } else if (o.metric == "stats") {
    const DatasetStats s = dataset_stats(records);
    emit(o.out, json ? dataset_stats_json(s) : dataset_stats_csv(s));
  } else if (o.metric == "replay") {
    int diverged = 0;
    std::string text;
    for (std::size_t i = 0; i < records.size(); ++i) {
      const ReplayReport r = replay(map, records[i]);
      diverged += !r.exact;
      text += "record " + std::to_string(i) + ": " + (r.exact ? std::string("exact") : "diverges, " + r.detail) + "\n";
    }
    emit(o.out, text);
    return diverged ? kFailed : kOk;
  } else {
    throw ArgumentError("unknown metric '" + o.metric + "'");
  }
  return unreadable ? kFailed : kOk;
}

int cmd_ingest(const std::vector<std::string>& inputs, const std::string& out) {
  const MapGraph& map = standard_map();
  const std::vector<std::string> files = expand_paths(inputs);
  if (files.empty()) {
    std::cerr << "no records\n";
    return kBadInput;
  }
  std::string accepted;
  int rejected = 0, games = 0;
  for (const std::string& f : files) {
    const IngestResult r = ingest(map, read_file(f));
    for (std::size_t i = 0; i < r.reports.size(); ++i, ++games) {
      const IngestReport& rep = r.reports[i];
      std::cout << f << " game " << i << ": ";
      if (rep.accepted) {
        std::cout << "accepted, " << rep.divergences.size() << " divergences\n";
      } else {
        ++rejected;
        std::cout << "rejected";
        if (rep.first_divergent)
          std::cout << " at phase " << rep.divergent_phase << " (index " << *rep.first_divergent << ")";
        std::cout << ": " << rep.error << "\n";
      }
      for (const std::string& d : rep.divergences) std::cout << "  " << d << "\n";
    }
    for (const GameRecord& rec : r.records) accepted += record_to_json(map, rec).dump() + "\n";
  }
  if (!out.empty()) write_file(out, accepted);
  std::cout << games - rejected << " of " << games << " games accepted\n";
  return rejected ? kFailed : kOk;
}

int cmd_encode(const std::vector<std::string>& inputs, const std::string& out, const std::string& vocab_out,
               bool masks) {
  const MapGraph& map = standard_map();
  const OrderVocabulary& vocab = OrderVocabulary::standard();
  if (!vocab_out.empty()) write_file(vocab_out, vocabulary_json(map, vocab).dump() + "\n");
  if (inputs.empty()) return kOk;
  int unreadable = 0;
  const std::vector<GameRecord> records = load_records(inputs, unreadable);
  if (records.empty()) {
    std::cerr << "no records\n";
    return kBadInput;
  }
  std::ofstream file;
  if (!out.empty() && out != "-") {
    file.open(out, std::ios::binary);
    if (!file) throw ArgumentError("cannot write " + out);
  }
  std::ostream& sink = file.is_open() ? static_cast<std::ostream&>(file) : std::cout;
  int failed = unreadable;
  for (std::size_t g = 0; g < records.size(); ++g) {
    try {
      for (const Json& phase : encode_record(map, vocab, records[g], static_cast<int>(g), masks))
        sink << phase.dump() << "\n";
    } catch (const StateError& e) {
      ++failed;
      std::cerr << "record " << g << ": " << e.what() << "\n";
    }
  }
  return failed ? kFailed : kOk;
}

int cmd_serve(const std::string& agent, std::uint64_t seed, bool tensors) {
  auto a = make_builtin_agent(agent, seed);
  serve_agent(standard_map(), *a, std::cin, std::cout, tensors);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"No Press Diplomacy engine"};
  app.set_config("--config", "", "key = value file; command-line flags take precedence");
  app.require_subcommand(1);
  int rc = kOk;

  std::string scenario_file;
  auto* adj = app.add_subcommand("adjudicate", "Resolve the phases of a scenario file and report");
  adj->add_option("file", scenario_file, "Scenario file")->required();
  adj->callback([&] { rc = cmd_adjudicate(scenario_file); });

  PlayOptions play;
  auto* pl = app.add_subcommand("play", "Play games and write their records");
  pl->add_option("--agents", play.agents, "Seven agent specs, e.g. random*7 or greedy,dumbbot*6")->capture_default_str();
  pl->add_option("-n,--games", play.games, "Number of games")->capture_default_str()->check(CLI::NonNegativeNumber);
  pl->add_option("--seed", play.seed, "Seed of game 0; game i uses seed + i")->capture_default_str();
  pl->add_option("--out", play.out, "Directory for game_NNNNN.json (default: JSON lines on stdout)");
  pl->add_option("--last-year", play.last_year, "Year after which the game is drawn")->capture_default_str();
  pl->add_option("--threads", play.threads, "Worker threads (0: all cores)")->capture_default_str();
  pl->add_flag("-v,--verbose", play.verbose, "Print every agent note");
  pl->callback([&] { rc = cmd_play(play); });

  TournamentOptions tour;
  auto* tn = app.add_subcommand("tournament", "1-vs-6 comparison or TrueSkill pool");
  tn->add_option("--mode", tour.mode, "1v6 or pool")->check(CLI::IsMember({"1v6", "pool"}))->capture_default_str();
  tn->add_option("--agents", tour.agents, "Comma-separated agent specs (1v6: A,B)")->capture_default_str();
  tn->add_option("-n,--games", tour.games, "Number of games")->capture_default_str()->check(CLI::NonNegativeNumber);
  tn->add_option("--seed", tour.seed, "Seed")->capture_default_str();
  tn->add_option("--last-year", tour.last_year, "Year after which games are drawn")->capture_default_str();
  tn->add_option("--threads", tour.threads, "Worker threads (0: all cores)")->capture_default_str();
  tn->add_option("--format", tour.format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  tn->add_option("--out", tour.out, "Output file (default: stdout)");
  tn->add_option("--sigma-trace", tour.sigma_trace, "Pool mode: CSV of every sigma after each game");
  tn->callback([&] { rc = cmd_tournament(tour); });

  AnalyzeOptions an;
  auto* az = app.add_subcommand("analyze", "Metrics over game records");
  az->add_option("metric", an.metric, "coalition, stats or replay")
      ->required()
      ->check(CLI::IsMember({"coalition", "stats", "replay"}));
  az->add_option("records", an.records, "Record files, directories or glob patterns")->required();
  az->add_option("--format", an.format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  az->add_option("--variant", an.variant, "Label of the coalition row")->capture_default_str();
  az->add_option("--out", an.out, "Output file (default: stdout)");
  az->callback([&] { rc = cmd_analyze(an); });

  std::vector<std::string> ingest_inputs;
  std::string ingest_out;
  auto* ig = app.add_subcommand("ingest", "Re-validate archived games");
  ig->add_option("archives", ingest_inputs, "Archive files, directories or glob patterns")->required();
  ig->add_option("--out", ingest_out, "JSON lines file for the accepted, engine-validated records");
  ig->callback([&] { rc = cmd_ingest(ingest_inputs, ingest_out); });

  std::vector<std::string> encode_inputs;
  std::string encode_out, vocab_out;
  bool no_masks = false;
  auto* en = app.add_subcommand("encode", "Export per-phase feature tensors and orders as JSON lines");
  en->add_option("records", encode_inputs, "Record files, directories or glob patterns");
  en->add_option("--out", encode_out, "Output file (default: stdout)");
  en->add_option("--vocab", vocab_out, "Also write the order vocabulary to this file");
  en->add_flag("--no-masks", no_masks, "Leave out the per-location legal index lists");
  en->callback([&] { rc = cmd_encode(encode_inputs, encode_out, vocab_out, !no_masks); });

  std::string serve_agent_name = "random";
  std::uint64_t serve_seed = 0;
  bool serve_tensors = false;
  auto* sv = app.add_subcommand("serve", "Act as a protocol agent on stdin/stdout with a built-in bot");
  sv->add_option("--agent", serve_agent_name, "random, greedy, dumbbot or hold")->capture_default_str();
  sv->add_option("--seed", serve_seed, "Seed used until the engine sends one")->capture_default_str();
  sv->add_flag("--tensors", serve_tensors, "Ask for feature tensors with each request");
  sv->callback([&] { rc = cmd_serve(serve_agent_name, serve_seed, serve_tensors); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kBadInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailed;
  }
  return rc;
}
