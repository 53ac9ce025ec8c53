#include "diplo/ingest.hpp"

#include <algorithm>
#include <set>
#include <tuple>

#include "diplo/bots.hpp"
#include "diplo/error.hpp"
#include "diplo/protocol.hpp"

namespace diplo {

namespace {

ArchiveEntry entry_from(const MapGraph& map, const Json& j) {
  ArchiveEntry e;
  try {
    e.record = record_from_json(map, j);
  } catch (const Error& err) {
    e.error = err.what();
  }
  return e;
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r\n") - b + 1);
}

using ResultKey = std::tuple<Power, std::string>;

}  // namespace

std::vector<ArchiveEntry> read_archive(const MapGraph& map, std::string_view text) {
  std::vector<ArchiveEntry> out;
  text = trim(text);
  if (text.empty()) return out;

  // One record per line when the first line is a complete object on its own.
  const std::string_view first = trim(text.substr(0, text.find('\n')));
  const bool lines = first.size() < text.size() && Json::accept(first);
  if (lines) {
    std::size_t start = 0, number = 0;
    while (start <= text.size()) {
      const auto nl = std::min(text.find('\n', start), text.size());
      const std::string_view line = trim(text.substr(start, nl - start));
      start = nl + 1;
      ++number;
      if (line.empty()) continue;
      const Json j = Json::parse(line, nullptr, false);
      if (j.is_discarded())
        out.push_back({std::nullopt, "line " + std::to_string(number) + " is not valid JSON"});
      else
        out.push_back(entry_from(map, j));
    }
    return out;
  }

  const Json j = Json::parse(text, nullptr, false);
  if (j.is_discarded()) {
    out.push_back({std::nullopt, "archive is not valid JSON (truncated?)"});
  } else if (j.is_array()) {
    for (const Json& r : j) out.push_back(entry_from(map, r));
  } else {
    out.push_back(entry_from(map, j));
  }
  return out;
}

IngestReport ingest_record(const MapGraph& map, const GameRecord& in, GameRecord* out) {
  IngestReport rep;
  Game game(map, in.initial, in.rules);
  auto reject = [&](std::size_t i, std::string why) {
    rep.first_divergent = i;
    rep.divergent_phase = in.phases[i].name;
    rep.error = in.phases[i].name + ": " + std::move(why);
    return rep;
  };
  for (std::size_t i = 0; i < in.phases.size(); ++i) {
    const PhaseRecord& ph = in.phases[i];
    if (game.ended()) return reject(i, "phase after the end of the game");
    if (game.state().phase().code() != ph.name) return reject(i, "expected phase " + game.state().phase().code());
    game.step_text(ph.orders);
    const PhaseRecord& got = game.record().phases.back();

    std::set<ResultKey> invalid;
    for (const OrderResult& r : got.results) {
      if (r.result != OrderResult::Invalid || r.implicit) continue;
      invalid.insert({r.power, r.order});
      rep.divergences.push_back(ph.name + " " + std::string(power_name(r.power)) + ": invalid order '" + r.order +
                                "' (" + r.reason + "), unit holds");
    }
    // Other disagreements with the recorded results, invalid orders aside.
    auto explained = [&](const OrderResult& r) { return invalid.count({r.power, r.order}) > 0; };
    std::vector<OrderResult> recorded, engine;
    std::copy_if(ph.results.begin(), ph.results.end(), std::back_inserter(recorded), [&](auto& r) { return !explained(r); });
    std::copy_if(got.results.begin(), got.results.end(), std::back_inserter(engine), [&](auto& r) { return !explained(r); });
    if (recorded != engine) rep.divergences.push_back(ph.name + ": recorded results differ from the adjudication");

    if (!(got.state == ph.state)) return reject(i, "position after the phase differs from the record");
  }
  if (!(game.outcome() == in.outcome)) rep.divergences.push_back("recorded outcome differs from the final position");
  rep.accepted = true;
  if (out) *out = game.record();
  return rep;
}

int IngestResult::rejected() const {
  return static_cast<int>(std::count_if(reports.begin(), reports.end(), [](const auto& r) { return !r.accepted; }));
}

IngestResult ingest(const MapGraph& map, std::string_view archive) {
  IngestResult result;
  for (const ArchiveEntry& e : read_archive(map, archive)) {
    if (!e.record) {
      IngestReport rep;
      rep.error = e.error;
      result.reports.push_back(std::move(rep));
      continue;
    }
    GameRecord clean;
    result.reports.push_back(ingest_record(map, *e.record, &clean));
    if (result.reports.back().accepted) result.records.push_back(std::move(clean));
  }
  return result;
}

std::vector<Json> encode_record(const MapGraph& map, const OrderVocabulary& vocab, const GameRecord& record,
                                int game_index, bool masks) {
  const ReplayReport check = replay(map, record);
  if (!check.exact) throw StateError("record does not replay: " + check.detail);
  std::vector<Json> out;
  Game game(map, record.initial, record.rules);
  GameState issued_in = record.initial;
  for (const PhaseRecord& ph : record.phases) {
    const GameState& state = game.state();
    Json j;
    j["type"] = "phase";
    j["layout"] = kFeatureLayout;
    j["game"] = game_index;
    j["phase"] = ph.name;
    j["board"] = tensor_to_json(encode_board(map, state));
    j["prev_orders"] = tensor_to_json(encode_prev_orders(map, issued_in, game.last_movement_orders()));

    // The validated orders of this phase, from the replayed results.
    Game next = game;
    next.step_text(ph.orders);
    const std::vector<OrderResult>& results = next.record().phases.back().results;

    Json powers = Json::object();
    for (Power p : kAllPowers) {
      const AgentObservation obs = observe(map, state, p, {});
      if (obs.legal.empty()) continue;
      Json entry;
      entry["build_count"] = obs.build_count;
      std::vector<Loc> sites;
      for (const auto& site : obs.legal) sites.push_back(site.first);
      Json decode = Json::array();
      for (Loc l : decode_ordering(map, sites)) decode.push_back(map.location_name(l));
      entry["decode_order"] = decode;
      Json orders = Json::array();
      for (const OrderResult& r : results) {
        if (r.power != p || r.result == OrderResult::Invalid) continue;
        const Order o = parse_order(map, r.order);
        const auto idx = vocab.find(o);
        if (!idx) throw ContractError("order outside the vocabulary: " + r.order);
        Json e;
        e["loc"] = o.type == OrderType::Waive ? Json(nullptr) : Json(map.location_name(order_site(map, o)));
        e["order"] = r.order;
        e["index"] = *idx;
        if (r.implicit) e["implicit"] = true;
        orders.push_back(e);
      }
      entry["orders"] = orders;
      if (masks) {
        Json legal = Json::object();
        for (const auto& [loc, list] : obs.legal) {
          Json idx = Json::array();
          for (const Order& o : list) idx.push_back(*vocab.find(o));
          legal[std::string(map.location_name(loc))] = idx;
        }
        entry["legal"] = legal;
      }
      powers[std::string(power_name(p))] = entry;
    }
    j["powers"] = powers;
    out.push_back(std::move(j));

    if (state.phase().kind == PhaseKind::Movement) issued_in = state;
    game = std::move(next);
  }
  return out;
}

Json vocabulary_json(const MapGraph& map, const OrderVocabulary& vocab) {
  Json orders = Json::array();
  for (std::size_t i = 0; i < vocab.size(); ++i) orders.push_back(format_order(map, vocab.at(i)));
  return {{"layout", kFeatureLayout}, {"map", map.name()}, {"size", vocab.size()}, {"orders", orders}};
}

}  // namespace diplo
