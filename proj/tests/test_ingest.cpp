#include "diplo/error.hpp"
#include "diplo/ingest.hpp"
#include "diplo/protocol.hpp"
#include "doctest.h"
#include "support/sampling.hpp"

using namespace diplo;

namespace {

const MapGraph& M() { return standard_map(); }

const std::vector<GameRecord>& games() {
  static const auto g = sampling::games(M(), 3, 61, "dumbbot");
  return g;
}

std::string jsonl(const std::vector<GameRecord>& recs) {
  std::string out;
  for (const GameRecord& r : recs) out += record_to_json(M(), r).dump() + "\n";
  return out;
}

// Index of a movement phase in which a French unit held.
std::size_t phase_with_french_hold(const GameRecord& rec, std::string& unit) {
  for (std::size_t i = 0; i < rec.phases.size(); ++i) {
    if (rec.phases[i].name.back() != 'M') continue;
    for (const OrderResult& r : rec.phases[i].results)
      if (r.power == Power::France && r.order.size() > 2 && r.order.ends_with(" H")) {
        unit = r.order.substr(0, r.order.size() - 2);  // "A PAR H" -> "A PAR"
        return i;
      }
  }
  return rec.phases.size();
}

}  // namespace

TEST_CASE("engine records ingest unchanged") {
  for (const std::string& text : {write_record(M(), games()[0]), jsonl(games()),
                                  record_to_json(M(), games()[1]).dump(), "[" + record_to_json(M(), games()[0]).dump() +
                                                                              "," + record_to_json(M(), games()[2]).dump() + "]"}) {
    const IngestResult r = ingest(M(), text);
    CHECK(r.rejected() == 0);
    REQUIRE(r.records.size() == r.reports.size());
    for (const IngestReport& rep : r.reports) CHECK(rep.divergences.empty());
  }
  const IngestResult all = ingest(M(), jsonl(games()));
  REQUIRE(all.records.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) CHECK(all.records[i] == games()[i]);
  CHECK(ingest(M(), "  \n").reports.empty());
}

TEST_CASE("an illegal order is noted and the game still replays") {
  GameRecord rec = games()[0];
  std::string unit;
  const std::size_t k = phase_with_french_hold(rec, unit);
  REQUIRE(k < rec.phases.size());
  // A second, impossible order for the unit; it holds exactly as recorded.
  rec.phases[k].orders[Power::France].push_back(unit + " - MOS");

  GameRecord clean;
  const IngestReport rep = ingest_record(M(), rec, &clean);
  CHECK(rep.accepted);
  REQUIRE(rep.divergences.size() == 1);
  CHECK(rep.divergences[0].rfind(rec.phases[k].name + " FRANCE: invalid order '" + unit + " - MOS'", 0) == 0);
  CHECK(replay(M(), clean).exact);
  CHECK(clean.phases[k].state == games()[0].phases[k].state);
}

TEST_CASE("a mutated position is rejected at its phase") {
  const GameRecord& base = games()[1];
  for (std::size_t k : {std::size_t{0}, base.phases.size() / 2, base.phases.size() - 1}) {
    CAPTURE(k);
    GameRecord rec = base;
    GameState& s = rec.phases[k].state;
    std::vector<Unit> units = s.units();
    REQUIRE_FALSE(units.empty());
    units.pop_back();
    s.set_units(M(), units);
    const IngestResult r = ingest(M(), write_record(M(), rec));
    REQUIRE(r.reports.size() == 1);
    CHECK_FALSE(r.reports[0].accepted);
    REQUIRE(r.reports[0].first_divergent.has_value());
    CHECK(*r.reports[0].first_divergent == k);
    CHECK(r.reports[0].divergent_phase == base.phases[k].name);
    CHECK(r.records.empty());
  }

  // Orders that change the outcome of a phase diverge there as well.
  GameRecord rec = base;
  rec.phases[0].orders[Power::Germany] = {"A BER - SIL"};
  const IngestReport rep = ingest_record(M(), rec, nullptr);
  CHECK_FALSE(rep.accepted);
  CHECK(rep.first_divergent == std::size_t{0});
}

TEST_CASE("unreadable archives are rejected") {
  const std::string full = write_record(M(), games()[0]);
  IngestResult r = ingest(M(), full.substr(0, full.size() / 2));
  REQUIRE(r.reports.size() == 1);
  CHECK_FALSE(r.reports[0].accepted);
  CHECK(r.records.empty());

  const std::string lines = jsonl(games());
  r = ingest(M(), lines.substr(0, lines.size() - 100));
  REQUIRE(r.reports.size() == 3);
  CHECK(r.reports[0].accepted);
  CHECK(r.reports[1].accepted);
  CHECK_FALSE(r.reports[2].accepted);
  CHECK(r.reports[2].error.find("line 3") != std::string::npos);

  Json j = record_to_json(M(), games()[0]);
  j.erase("initial");
  r = ingest(M(), j.dump());
  CHECK(r.rejected() == 1);
  CHECK(r.reports[0].error.find("bad record") != std::string::npos);
}

TEST_CASE("training export") {
  const GameRecord& rec = games()[2];
  const OrderVocabulary& vocab = OrderVocabulary::standard();
  const auto phases = encode_record(M(), vocab, rec, 4);
  REQUIRE(phases.size() == rec.phases.size());
  const auto states = [&] {
    std::vector<GameState> s = {rec.initial};
    for (const PhaseRecord& ph : rec.phases) s.push_back(ph.state);
    return s;
  }();
  // No previous movement phase at the start: every row is in the none categories.
  const Tensor first = tensor_from_json(phases[0]["prev_orders"]);
  for (int r = 0; r < first.rows; ++r) {
    CHECK(first.at(r, prev_order::kUnitKind + 2) == 1.0f);
    CHECK(first.at(r, prev_order::kOrderKind + 4) == 1.0f);
  }
  std::size_t seen_orders = 0;
  for (std::size_t i = 0; i < phases.size(); ++i) {
    const Json& j = phases[i];
    CHECK(j["game"] == 4);
    CHECK(j["phase"] == rec.phases[i].name);
    CHECK(j["layout"] == kFeatureLayout);
    CHECK(tensor_from_json(j["board"]) == encode_board(M(), states[i]));
    for (const auto& [power, entry] : j["powers"].items()) {
      CHECK_NOTHROW(parse_power(power));
      for (const auto& o : entry["orders"]) {
        const Order order = vocab.at(o["index"].get<std::size_t>());
        CHECK(format_order(M(), order) == o["order"].get<std::string>());
        if (order.type != OrderType::Waive) {
          const std::string loc = o["loc"];
          const auto& legal = entry["legal"][loc];
          CHECK(std::find(legal.begin(), legal.end(), o["index"]) != legal.end());
        }
        ++seen_orders;
      }
      for (const auto& [loc, list] : entry["legal"].items())
        CHECK(list.get<std::vector<int>>() == legal_indices(vocab, M(), states[i], M().location(loc)));
      CHECK(entry["decode_order"].size() == entry["legal"].size());
    }
  }
  CHECK(seen_orders > 0);
  CHECK_FALSE(encode_record(M(), vocab, rec, 0, false)[0]["powers"]["FRANCE"].contains("legal"));

  GameRecord broken = rec;
  broken.phases[0].state = rec.initial;
  CHECK_THROWS_AS(encode_record(M(), vocab, broken, 0), StateError);

  const Json v = vocabulary_json(M(), vocab);
  CHECK(v["size"] == vocab.size());
  CHECK(v["orders"][vocab.waive_index()] == "WAIVE");
}
