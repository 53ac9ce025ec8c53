#pragma once

#include <span>
#include <string>
#include <vector>

#include "diplo/map.hpp"
#include "diplo/order.hpp"
#include "diplo/state.hpp"

namespace diplo {

struct OrderVerdict {
  Order order;
  Power power;
  bool succeeds = false;
  std::string reason;     // why it failed; empty on success
  bool implicit = false;  // filled in by the engine (default hold, auto-disband, ...)
};

// Adjudicator output. Verdicts are sorted by the order's site location so the
// value is independent of submission order.
struct Resolution {
  PhaseKind kind = PhaseKind::Movement;
  std::vector<OrderVerdict> verdicts;
  std::vector<DislodgedUnit> dislodged;
  std::vector<Province> standoffs;
  std::vector<Unit> positions;  // every unit on the board afterwards (not the dislodged)

  // Verdict for `o`, or nullptr.
  const OrderVerdict* find(const Order& o) const;

  friend bool operator==(const Resolution& a, const Resolution& b);
};

// Orders for one movement phase from all powers. Units without an order hold.
// Throws ContractError for orders that do not belong to a unit on the board,
// duplicate orders, or orders of the wrong phase type.
Resolution resolve_movement(const MapGraph& map, const GameState& state, std::span<const Order> orders);

// Retreats to distinct legal destinations succeed; retreats that collide all
// fail and the units disband; dislodged units without orders disband.
Resolution resolve_retreats(const MapGraph& map, const GameState& state, std::span<const Order> orders);

// Builds and disbands (validated). Missing disbands are chosen automatically:
// units farthest from an owned home centre go first, ties by location order.
// Every unused build gets a WAIVE verdict; explicit WAIVE orders carry no
// power and are otherwise ignored.
Resolution resolve_adjustments(const MapGraph& map, const GameState& state, std::span<const Order> orders);

Resolution resolve(const MapGraph& map, const GameState& state, std::span<const Order> orders);

// Units a power would lose to civil disorder when `count` disbands are due.
std::vector<Loc> auto_disband_choice(const MapGraph& map, const GameState& state, Power power, int count);

// Installs the resolution and advances the calendar: retreat phases only
// when something was dislodged, ownership updated at the end of Fall, winter
// only when some power has a non-zero build count.
GameState apply(const MapGraph& map, const GameState& state, const Resolution& resolution);

// The phase that follows `state` once `resolution` is installed.
Phase next_phase(const MapGraph& map, const GameState& state, const Resolution& resolution);

// Re-resolves a movement phase with `dropped` replaced by a hold for its unit.
// Throws ArgumentError if `dropped` is not among `orders`.
Resolution counterfactual_without(const MapGraph& map, const GameState& state, std::span<const Order> orders,
                                  const Order& dropped);

}  // namespace diplo
