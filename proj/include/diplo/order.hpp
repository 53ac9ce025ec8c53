#pragma once

#include <array>
#include <bitset>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "diplo/map.hpp"
#include "diplo/state.hpp"

namespace diplo {

enum class OrderType : std::uint8_t {
  Hold,
  Move,
  SupportHold,
  SupportMove,
  Convoy,
  Retreat,
  Disband,
  Build,
  Waive,
};

// One order in the canonical grammar:
//
//   A PAR H               Hold
//   A PAR - BUR [VIA]     Move (VIA marks a convoyed move)
//   A MAR S A PAR         SupportHold
//   A MAR S A PAR - BUR   SupportMove
//   F ENG C A LON - BRE   Convoy
//   A PAR R BUR           Retreat
//   A PAR D               Disband
//   A PAR B               Build
//   WAIVE
//
// Support and convoy destinations are provinces and are stored as the
// province's parent location.
struct Order {
  OrderType type = OrderType::Hold;
  UnitKind kind = UnitKind::Army;  // acting (or built) unit
  Loc loc{};                       // acting unit / build location
  UnitKind target_kind = UnitKind::Army;
  Loc target{};  // supported unit / convoyed army
  Loc dest{};    // move, retreat, supported-move or convoy destination
  bool via_convoy = false;

  static Order hold(UnitKind k, Loc at) { return {OrderType::Hold, k, at}; }
  static Order move(UnitKind k, Loc from, Loc to, bool via = false) {
    return {OrderType::Move, k, from, UnitKind::Army, Loc{}, to, via};
  }
  static Order support_hold(UnitKind k, Loc at, UnitKind tk, Loc target) {
    return {OrderType::SupportHold, k, at, tk, target};
  }
  static Order support_move(UnitKind k, Loc at, UnitKind tk, Loc src, Loc dest) {
    return {OrderType::SupportMove, k, at, tk, src, dest};
  }
  static Order convoy(Loc fleet, Loc army_src, Loc army_dest) {
    return {OrderType::Convoy, UnitKind::Fleet, fleet, UnitKind::Army, army_src, army_dest};
  }
  static Order retreat(UnitKind k, Loc from, Loc to) { return {OrderType::Retreat, k, from, UnitKind::Army, Loc{}, to}; }
  static Order disband(UnitKind k, Loc at) { return {OrderType::Disband, k, at}; }
  static Order build(UnitKind k, Loc at) { return {OrderType::Build, k, at}; }
  static Order waive() { return {OrderType::Waive}; }

  bool is_support() const { return type == OrderType::SupportHold || type == OrderType::SupportMove; }

  // Packs every meaningful field; equal orders have equal keys.
  std::uint64_t key() const;

  friend bool operator==(const Order& a, const Order& b) { return a.key() == b.key(); }
  friend bool operator<(const Order& a, const Order& b) { return a.key() < b.key(); }
};

struct OrderHash {
  std::size_t operator()(const Order& o) const { return std::hash<std::uint64_t>{}(o.key()); }
};

// Case-insensitive parse of the canonical grammar. Throws ParseError with the
// offending token's position for syntax errors, unknown provinces and
// malformed coast tags.
Order parse_order(const MapGraph& map, std::string_view text);

std::string format_order(const MapGraph& map, const Order& order);

// Fleet-chain reachability for convoys, derived from fleet presence.
// Built once per position and shared by every legal-order query on it.
class ConvoyGraph {
 public:
  ConvoyGraph(const MapGraph& map, const GameState& state);

  // Component id of the fleet-occupied sea `p`, or -1.
  int component(Province p) const { return component_[index(p)]; }
  // True if a chain of fleets through component `c` links provinces a and b.
  bool links(int c, Province a, Province b) const;
  // True if some chain of fleets links the coastal provinces a and b (a != b).
  bool can_convoy(Province a, Province b) const;

 private:
  const MapGraph* map_;
  std::array<int, kNumProvinces> component_{};
  // Per component: coastal provinces bordering one of its seas.
  std::vector<std::bitset<kNumProvinces>> shores_;
};

struct LegalOrders {
  std::vector<Order> orders;  // sorted by key
  // False when nothing at `loc` can be ordered this phase.
  bool orderable = false;
};

// Every order legal for the unit (or build site) at `loc` in the current
// phase, for whichever power owns it.
LegalOrders legal_orders(const MapGraph& map, const GameState& state, Loc loc);
LegalOrders legal_orders(const MapGraph& map, const GameState& state, const ConvoyGraph& convoys, Loc loc);

// The power whose order is expected at `loc` this phase, if any.
std::optional<Power> orderable_owner(const MapGraph& map, const GameState& state, Loc loc);

// Location an order is keyed on: its unit, or for builds the province's parent.
Loc order_site(const MapGraph& map, const Order& order);

struct OrderCheck {
  Order order;  // canonicalised
  bool valid = false;
  std::string reason;  // empty when valid
};

// Check-style validation: one result per input order, in input order.
// Duplicate orders for a unit keep the first. Excess builds or disbands are
// rejected in submission order.
std::vector<OrderCheck> validate(const MapGraph& map, const GameState& state, Power power,
                                 std::span<const Order> orders);

// Rewrites harmless variants into their canonical legal form: a convoy-only
// move without VIA gains it; a fleet move naming a split-coast province gets
// the coast when only one is reachable.
Order canonicalize(const MapGraph& map, const GameState& state, const Order& order);

}  // namespace diplo
