#pragma once

#include <array>
#include <compare>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "diplo/map.hpp"
#include "diplo/types.hpp"

namespace diplo {

enum class Season : std::uint8_t { Spring, Fall, Winter };
enum class PhaseKind : std::uint8_t { Movement, Retreat, Adjustment };

inline constexpr int kFirstYear = 1901;

// A point in the calendar. Codes follow `[SFW]<year>[MRA]`, e.g. S1901M.
struct Phase {
  int year = kFirstYear;
  Season season = Season::Spring;
  PhaseKind kind = PhaseKind::Movement;

  std::string code() const;
  // Throws ArgumentError on malformed codes or invalid season/kind pairs.
  static Phase parse(std::string_view code);

  // Calendar position within the year: 0..4 for SM, SR, FM, FR, WA.
  int ordinal() const;

  friend auto operator<=>(const Phase& a, const Phase& b) {
    if (auto c = a.year <=> b.year; c != 0) return c;
    return a.ordinal() <=> b.ordinal();
  }
  friend bool operator==(const Phase&, const Phase&) = default;
};

struct Unit {
  UnitKind kind;
  Loc location;
  Power owner;

  friend bool operator==(const Unit&, const Unit&) = default;
};

struct DislodgedUnit {
  Unit unit;
  // Province the successful attacker came from. A dislodged unit may not
  // retreat there unless the attacker arrived by convoy.
  Province attacker_origin;
  bool attacker_convoyed = false;

  friend bool operator==(const DislodgedUnit&, const DislodgedUnit&) = default;
};

// Immutable-by-convention game position. Transitions build a new value.
class GameState {
 public:
  GameState() { occupant_.fill(-1); }

  const Phase& phase() const { return phase_; }
  void set_phase(Phase p) { phase_ = p; }

  // Units sorted by location index; at most one per province.
  const std::vector<Unit>& units() const { return units_; }
  // Replaces all units. Throws ContractError if two share a province.
  void set_units(const MapGraph& map, std::vector<Unit> units);
  const Unit* unit_in(Province p) const { return occupant_[index(p)] < 0 ? nullptr : &units_[occupant_[index(p)]]; }
  const Unit* unit_at(const MapGraph& map, Loc l) const { return unit_in(map.province_of(l)); }

  const std::vector<DislodgedUnit>& dislodged() const { return dislodged_; }
  void set_dislodged(std::vector<DislodgedUnit> d);
  const DislodgedUnit* dislodged_in(const MapGraph& map, Province p) const;

  // Owner per supply centre, indexed by MapGraph::supply_center_index.
  const std::array<std::optional<Power>, kNumSupplyCenters>& sc_owners() const { return sc_owner_; }
  std::optional<Power> sc_owner(const MapGraph& map, Province p) const;
  void set_sc_owner(const MapGraph& map, Province p, std::optional<Power> owner);

  // Provinces left vacant by a bounce in the last movement phase.
  const std::vector<Province>& standoffs() const { return standoffs_; }
  void set_standoffs(std::vector<Province> s);
  bool is_standoff(Province p) const;

  int unit_count(Power p) const;
  int sc_count(Power p) const;
  // Supply centres the power would own if ownership were updated now:
  // occupied centres count for the occupant, vacant ones for their owner.
  int controlled_sc_count(const MapGraph& map, Power p) const;
  bool is_eliminated(Power p) const { return unit_count(p) == 0 && sc_count(p) == 0; }

  friend bool operator==(const GameState& a, const GameState& b) {
    return a.phase_ == b.phase_ && a.units_ == b.units_ && a.dislodged_ == b.dislodged_ &&
           a.sc_owner_ == b.sc_owner_ && a.standoffs_ == b.standoffs_;
  }

 private:
  Phase phase_;
  std::vector<Unit> units_;
  std::array<std::int8_t, kNumProvinces> occupant_{};
  std::vector<DislodgedUnit> dislodged_;
  std::array<std::optional<Power>, kNumSupplyCenters> sc_owner_{};
  std::vector<Province> standoffs_;
};

// S1901M with the opening units and home-centre ownership from the map data.
GameState initial_state(const MapGraph& map);

// Locations the power must (or may) order this phase, in location order.
// Movement: its units. Retreat: its dislodged units. Adjustment: its
// available build sites when build_count > 0, every unit (disband
// candidates) when build_count < 0, otherwise none.
std::vector<Loc> units_requiring_orders(const MapGraph& map, const GameState& state, Power power);

// Owned home centres that are currently unoccupied.
std::vector<Province> available_build_sites(const MapGraph& map, const GameState& state, Power power);

// (#owned SCs - #units), clamped above by the number of available build
// sites. Throws PhaseError outside adjustment phases.
int build_count(const MapGraph& map, const GameState& state, Power power);

// Transfers each occupied supply centre to the occupying unit's owner.
GameState update_ownership(const MapGraph& map, const GameState& state);

std::string unit_string(const MapGraph& map, const Unit& u);

}  // namespace diplo
