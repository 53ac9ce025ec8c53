#include "diplo/record.hpp"

#include <algorithm>

#include "diplo/error.hpp"

namespace diplo {

namespace {

Unit parse_unit(const MapGraph& map, const std::string& text, Power owner) {
  if (text.size() < 3 || (text[0] != 'A' && text[0] != 'F') || text[1] != ' ')
    throw SchemaError("bad unit '" + text + "'");
  auto loc = map.find_location(text.substr(2));
  if (!loc) throw SchemaError("bad unit location '" + text + "'");
  return {text[0] == 'A' ? UnitKind::Army : UnitKind::Fleet, *loc, owner};
}

Province parse_province(const MapGraph& map, const std::string& name) {
  auto p = map.find_province(name);
  if (!p) throw SchemaError("unknown province '" + name + "'");
  return *p;
}

Power parse_power_field(const std::string& name) {
  auto p = find_power(name);
  if (!p) throw SchemaError("unknown power '" + name + "'");
  return *p;
}

std::string unit_text(const MapGraph& map, const Unit& u) {
  return std::string(1, unit_letter(u.kind)) + " " + std::string(map.location_name(u.location));
}

OrderResult::Kind parse_result(const std::string& s) {
  if (s == "succeeds") return OrderResult::Succeeds;
  if (s == "fails") return OrderResult::Fails;
  if (s == "invalid") return OrderResult::Invalid;
  throw SchemaError("unknown result '" + s + "'");
}

OutcomeKind parse_outcome_kind(const std::string& s) {
  if (s == "ongoing") return OutcomeKind::Ongoing;
  if (s == "solo") return OutcomeKind::Solo;
  if (s == "draw") return OutcomeKind::Draw;
  throw SchemaError("unknown outcome '" + s + "'");
}

Json outcome_to_json(const Outcome& o) {
  Json j;
  j["kind"] = outcome_kind_name(o.kind);
  if (o.winner) j["winner"] = power_name(*o.winner);
  Json s = Json::array();
  for (Power p : o.survivors) s.push_back(power_name(p));
  j["survivors"] = s;
  return j;
}

Outcome outcome_from_json(const Json& j) {
  Outcome o;
  o.kind = parse_outcome_kind(j.at("kind").get<std::string>());
  if (j.contains("winner")) o.winner = parse_power_field(j.at("winner").get<std::string>());
  for (const auto& s : j.at("survivors")) o.survivors.push_back(parse_power_field(s.get<std::string>()));
  return o;
}

std::string describe(const OrderResult& r) {
  return std::string(power_name(r.power)) + " " + r.order + " " + std::string(result_name(r.result));
}

}  // namespace

std::string_view outcome_kind_name(OutcomeKind k) {
  switch (k) {
    case OutcomeKind::Ongoing: return "ongoing";
    case OutcomeKind::Solo: return "solo";
    case OutcomeKind::Draw: return "draw";
  }
  return "?";
}

std::string_view result_name(OrderResult::Kind k) {
  switch (k) {
    case OrderResult::Succeeds: return "succeeds";
    case OrderResult::Fails: return "fails";
    case OrderResult::Invalid: return "invalid";
  }
  return "?";
}

Json state_to_json(const MapGraph& map, const GameState& state) {
  Json j;
  j["phase"] = state.phase().code();
  Json units = Json::object();
  for (Power p : kAllPowers) {
    Json list = Json::array();
    for (const Unit& u : state.units())
      if (u.owner == p) list.push_back(unit_text(map, u));
    if (!list.empty()) units[std::string(power_name(p))] = list;
  }
  j["units"] = units;
  Json centers = Json::object();
  for (Power p : kAllPowers) {
    Json list = Json::array();
    for (Province sc : map.supply_centers())
      if (state.sc_owner(map, sc) == p) list.push_back(map.province_name(sc));
    if (!list.empty()) centers[std::string(power_name(p))] = list;
  }
  j["centers"] = centers;
  Json dislodged = Json::array();
  for (const DislodgedUnit& d : state.dislodged())
    dislodged.push_back({{"unit", unit_text(map, d.unit)},
                         {"power", power_name(d.unit.owner)},
                         {"attacker", map.province_name(d.attacker_origin)},
                         {"convoyed", d.attacker_convoyed}});
  j["dislodged"] = dislodged;
  Json standoffs = Json::array();
  for (Province p : state.standoffs()) standoffs.push_back(map.province_name(p));
  j["standoffs"] = standoffs;
  return j;
}

GameState state_from_json(const MapGraph& map, const Json& j) {
  try {
    GameState s;
    s.set_phase(Phase::parse(j.at("phase").get<std::string>()));
    std::vector<Unit> units;
    for (const auto& [power, list] : j.at("units").items())
      for (const auto& u : list) units.push_back(parse_unit(map, u.get<std::string>(), parse_power_field(power)));
    s.set_units(map, std::move(units));
    for (const auto& [power, list] : j.at("centers").items())
      for (const auto& c : list) {
        const Province p = parse_province(map, c.get<std::string>());
        if (!map.is_supply_center(p)) throw SchemaError("not a supply centre: " + c.get<std::string>());
        s.set_sc_owner(map, p, parse_power_field(power));
      }
    std::vector<DislodgedUnit> dislodged;
    for (const auto& d : j.at("dislodged"))
      dislodged.push_back({parse_unit(map, d.at("unit").get<std::string>(), parse_power_field(d.at("power"))),
                           parse_province(map, d.at("attacker").get<std::string>()), d.at("convoyed").get<bool>()});
    s.set_dislodged(std::move(dislodged));
    std::vector<Province> standoffs;
    for (const auto& p : j.at("standoffs")) standoffs.push_back(parse_province(map, p.get<std::string>()));
    s.set_standoffs(std::move(standoffs));
    return s;
  } catch (const Json::exception& e) {
    throw SchemaError(std::string("bad state: ") + e.what());
  } catch (const ArgumentError& e) {
    throw SchemaError(std::string("bad state: ") + e.what());
  } catch (const ContractError& e) {
    throw SchemaError(std::string("bad state: ") + e.what());
  }
}

Json record_to_json(const MapGraph& map, const GameRecord& record) {
  Json j;
  j["version"] = kRecordVersion;
  j["map"] = record.map;
  j["rules"] = {{"check", true}, {"last_year", record.rules.last_year}, {"draw", "year_cap"}};
  j["initial"] = state_to_json(map, record.initial);
  Json phases = Json::array();
  for (const PhaseRecord& ph : record.phases) {
    Json p;
    p["name"] = ph.name;
    Json orders = Json::object();
    for (const auto& [power, list] : ph.orders) orders[std::string(power_name(power))] = list;
    p["orders"] = orders;
    Json results = Json::array();
    for (const OrderResult& r : ph.results) {
      Json e = {{"power", power_name(r.power)}, {"order", r.order}, {"result", result_name(r.result)}};
      if (!r.reason.empty()) e["reason"] = r.reason;
      if (r.implicit) e["implicit"] = true;
      results.push_back(e);
    }
    p["results"] = results;
    p["state"] = state_to_json(map, ph.state);
    phases.push_back(p);
  }
  j["phases"] = phases;
  j["outcome"] = outcome_to_json(record.outcome);
  return j;
}

GameRecord record_from_json(const MapGraph& map, const Json& j) {
  try {
    if (j.at("version").get<int>() != kRecordVersion) throw SchemaError("unsupported record version");
    GameRecord rec;
    rec.map = j.at("map").get<std::string>();
    if (rec.map != map.name()) throw SchemaError("record is for map '" + rec.map + "'");
    rec.rules.last_year = j.at("rules").at("last_year").get<int>();
    rec.initial = state_from_json(map, j.at("initial"));
    for (const auto& p : j.at("phases")) {
      PhaseRecord ph;
      ph.name = p.at("name").get<std::string>();
      for (const auto& [power, list] : p.at("orders").items())
        ph.orders[parse_power_field(power)] = list.get<std::vector<std::string>>();
      for (const auto& r : p.at("results")) {
        OrderResult res;
        res.power = parse_power_field(r.at("power").get<std::string>());
        res.order = r.at("order").get<std::string>();
        res.result = parse_result(r.at("result").get<std::string>());
        res.reason = r.value("reason", "");
        res.implicit = r.value("implicit", false);
        ph.results.push_back(std::move(res));
      }
      ph.state = state_from_json(map, p.at("state"));
      rec.phases.push_back(std::move(ph));
    }
    rec.outcome = outcome_from_json(j.at("outcome"));
    return rec;
  } catch (const Json::exception& e) {
    throw SchemaError(std::string("bad record: ") + e.what());
  }
}

std::string write_record(const MapGraph& map, const GameRecord& record) {
  return record_to_json(map, record).dump(1) + "\n";
}

GameRecord read_record(const MapGraph& map, std::string_view text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::exception& e) {
    throw SchemaError(std::string("unreadable record: ") + e.what());
  }
  return record_from_json(map, j);
}

ReplayReport replay(const MapGraph& map, const GameRecord& record) {
  ReplayReport rep;
  Game game(map, record.initial, record.rules);
  auto diverge = [&](std::size_t i, std::string why) {
    rep.exact = false;
    rep.first_divergent = i;
    rep.detail = record.phases[i].name + ": " + std::move(why);
    return rep;
  };
  for (std::size_t i = 0; i < record.phases.size(); ++i) {
    const PhaseRecord& ph = record.phases[i];
    if (game.ended()) return diverge(i, "game already ended");
    if (game.state().phase().code() != ph.name) return diverge(i, "expected phase " + game.state().phase().code());
    game.step_text(ph.orders);
    const PhaseRecord& got = game.record().phases.back();
    if (got.results != ph.results) {
      const auto mismatch = std::mismatch(got.results.begin(), got.results.end(), ph.results.begin(), ph.results.end());
      std::string why = "results differ";
      if (mismatch.first != got.results.end()) why += ": replay has " + describe(*mismatch.first);
      return diverge(i, why);
    }
    if (!(got.state == ph.state)) return diverge(i, "snapshot differs");
  }
  if (!(game.outcome() == record.outcome)) {
    rep.exact = false;
    rep.detail = "outcome differs";
  }
  return rep;
}

}  // namespace diplo
