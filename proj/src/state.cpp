#include "diplo/state.hpp"

#include <algorithm>
#include <charconv>

#include "diplo/error.hpp"

namespace diplo {

std::string Phase::code() const {
  std::string out;
  out += season == Season::Spring ? 'S' : season == Season::Fall ? 'F' : 'W';
  out += std::to_string(year);
  out += kind == PhaseKind::Movement ? 'M' : kind == PhaseKind::Retreat ? 'R' : 'A';
  return out;
}

Phase Phase::parse(std::string_view code) {
  if (code.size() < 3) throw ArgumentError("bad phase code '" + std::string(code) + "'");
  Phase p;
  switch (code.front()) {
    case 'S': p.season = Season::Spring; break;
    case 'F': p.season = Season::Fall; break;
    case 'W': p.season = Season::Winter; break;
    default: throw ArgumentError("bad phase season in '" + std::string(code) + "'");
  }
  switch (code.back()) {
    case 'M': p.kind = PhaseKind::Movement; break;
    case 'R': p.kind = PhaseKind::Retreat; break;
    case 'A': p.kind = PhaseKind::Adjustment; break;
    default: throw ArgumentError("bad phase kind in '" + std::string(code) + "'");
  }
  auto digits = code.substr(1, code.size() - 2);
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), p.year);
  if (ec != std::errc() || ptr != digits.data() + digits.size() || digits.empty() || digits.front() == '+' ||
      p.year < kFirstYear)
    throw ArgumentError("bad phase year in '" + std::string(code) + "'");
  const bool winter = p.season == Season::Winter;
  if (winter != (p.kind == PhaseKind::Adjustment))
    throw ArgumentError("season and phase kind do not match in '" + std::string(code) + "'");
  return p;
}

int Phase::ordinal() const {
  switch (season) {
    case Season::Spring: return kind == PhaseKind::Movement ? 0 : 1;
    case Season::Fall: return kind == PhaseKind::Movement ? 2 : 3;
    case Season::Winter: return 4;
  }
  return 0;
}

void GameState::set_units(const MapGraph& map, std::vector<Unit> units) {
  std::sort(units.begin(), units.end(),
            [](const Unit& a, const Unit& b) { return index(a.location) < index(b.location); });
  occupant_.fill(-1);
  for (std::size_t i = 0; i < units.size(); ++i) {
    const int p = index(map.province_of(units[i].location));
    if (occupant_[p] >= 0)
      throw ContractError("two units in " + std::string(map.province_name(province_at(p))));
    occupant_[p] = static_cast<std::int8_t>(i);
  }
  units_ = std::move(units);
}

void GameState::set_dislodged(std::vector<DislodgedUnit> d) {
  std::sort(d.begin(), d.end(), [](const DislodgedUnit& a, const DislodgedUnit& b) {
    return index(a.unit.location) < index(b.unit.location);
  });
  dislodged_ = std::move(d);
}

const DislodgedUnit* GameState::dislodged_in(const MapGraph& map, Province p) const {
  for (const auto& d : dislodged_)
    if (map.province_of(d.unit.location) == p) return &d;
  return nullptr;
}

std::optional<Power> GameState::sc_owner(const MapGraph& map, Province p) const {
  const int i = map.supply_center_index(p);
  if (i < 0) return std::nullopt;
  return sc_owner_[i];
}

void GameState::set_sc_owner(const MapGraph& map, Province p, std::optional<Power> owner) {
  const int i = map.supply_center_index(p);
  if (i < 0) throw ArgumentError(std::string(map.province_name(p)) + " is not a supply center");
  sc_owner_[i] = owner;
}

void GameState::set_standoffs(std::vector<Province> s) {
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  standoffs_ = std::move(s);
}

bool GameState::is_standoff(Province p) const {
  return std::binary_search(standoffs_.begin(), standoffs_.end(), p);
}

int GameState::unit_count(Power p) const {
  return static_cast<int>(std::count_if(units_.begin(), units_.end(), [p](const Unit& u) { return u.owner == p; }));
}

int GameState::sc_count(Power p) const {
  return static_cast<int>(std::count(sc_owner_.begin(), sc_owner_.end(), std::optional<Power>(p)));
}

int GameState::controlled_sc_count(const MapGraph& map, Power p) const {
  int n = 0;
  for (int i = 0; i < kNumSupplyCenters; ++i) {
    const Unit* u = unit_in(map.supply_centers()[i]);
    const std::optional<Power> holder = u ? std::optional<Power>(u->owner) : sc_owner_[i];
    if (holder == p) ++n;
  }
  return n;
}

GameState initial_state(const MapGraph& map) {
  GameState s;
  s.set_phase(Phase{kFirstYear, Season::Spring, PhaseKind::Movement});
  std::vector<Unit> units;
  for (const auto& ou : map.opening_units()) units.push_back({ou.kind, ou.location, ou.power});
  s.set_units(map, std::move(units));
  for (Power pw : kAllPowers)
    for (Province p : map.home_centers(pw)) s.set_sc_owner(map, p, pw);
  return s;
}

std::vector<Province> available_build_sites(const MapGraph& map, const GameState& state, Power power) {
  std::vector<Province> out;
  for (Province p : map.home_centers(power))
    if (state.sc_owner(map, p) == power && state.unit_in(p) == nullptr) out.push_back(p);
  return out;
}

int build_count(const MapGraph& map, const GameState& state, Power power) {
  if (state.phase().kind != PhaseKind::Adjustment)
    throw PhaseError("build_count requires an adjustment phase, got " + state.phase().code());
  const int diff = state.sc_count(power) - state.unit_count(power);
  if (diff <= 0) return diff;
  return std::min(diff, static_cast<int>(available_build_sites(map, state, power).size()));
}

std::vector<Loc> units_requiring_orders(const MapGraph& map, const GameState& state, Power power) {
  std::vector<Loc> out;
  switch (state.phase().kind) {
    case PhaseKind::Movement:
      for (const auto& u : state.units())
        if (u.owner == power) out.push_back(u.location);
      break;
    case PhaseKind::Retreat:
      for (const auto& d : state.dislodged())
        if (d.unit.owner == power) out.push_back(d.unit.location);
      break;
    case PhaseKind::Adjustment: {
      const int n = build_count(map, state, power);
      if (n > 0) {
        for (Province p : available_build_sites(map, state, power)) out.push_back(map.parent_location(p));
      } else if (n < 0) {
        for (const auto& u : state.units())
          if (u.owner == power) out.push_back(u.location);
      }
      break;
    }
  }
  std::sort(out.begin(), out.end(), [](Loc a, Loc b) { return index(a) < index(b); });
  return out;
}

GameState update_ownership(const MapGraph& map, const GameState& state) {
  GameState next = state;
  for (const auto& u : state.units()) {
    const Province p = map.province_of(u.location);
    if (map.is_supply_center(p)) next.set_sc_owner(map, p, u.owner);
  }
  return next;
}

std::string unit_string(const MapGraph& map, const Unit& u) {
  std::string s(1, unit_letter(u.kind));
  s += ' ';
  s += map.location_name(u.location);
  return s;
}

}  // namespace diplo
